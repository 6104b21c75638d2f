#pragma once

#include <string>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::fea {

// Isotropic linear-elastic material. Unit system is mm-N-MPa-s throughout; the
// density is stored as the commonly quoted kg/mm^3 and converted to tonne/mm^3
// (x 1e-3) wherever rho*a must come out in N/mm^3.
struct Material {
  double young_modulus_mpa = 0.0;
  double poisson_ratio = 0.0;
  double density_kg_mm3 = 0.0;

  double density_consistent() const { return density_kg_mm3 * 1e-3; }

  void validate() const {
    if (young_modulus_mpa <= 0.0) throw MeshError("material: Young's modulus must be positive");
    if (poisson_ratio <= -1.0 || poisson_ratio >= 0.5)
      throw MeshError("material: Poisson's ratio must lie in (-1, 0.5)");
    if (density_kg_mm3 < 0.0) throw MeshError("material: density must be non-negative");
  }
};

enum class LoadDistribution { EqualPerNode, AreaWeighted };

struct SurfaceLoad {
  std::string node_set;
  Vec3 total_force_n;  // shared over the set per the distribution rule
  LoadDistribution distribution = LoadDistribution::EqualPerNode;
};

struct Constraint {
  std::string node_set;
  std::array<bool, 3> fixed_dof{true, true, true};
};

struct LoadCase {
  Vec3 gravity_mm_s2{0, 0, 0};
  std::vector<SurfaceLoad> surface_loads;
  std::vector<Constraint> constraints;

  void validate(const VolumeMesh& mesh) const {
    for (const auto& l : surface_loads)
      if (!mesh.node_sets.count(l.node_set))
        throw MeshError("load case references missing node set '" + l.node_set + "'");
    for (const auto& c : constraints) {
      if (!mesh.node_sets.count(c.node_set))
        throw MeshError("load case references missing node set '" + c.node_set + "'");
      if (!c.fixed_dof[0] && !c.fixed_dof[1] && !c.fixed_dof[2])
        throw MeshError("constraint on '" + c.node_set + "' fixes no DOF");
    }
  }
};

// Solution fields recovered from a static solve. Stress/strain tensors use Voigt
// order (xx, yy, zz, xy, yz, zx) with engineering shear strains, evaluated at
// element centers.
struct FieldResult {
  std::vector<Vec3> displacement_mm;            // per node
  std::vector<std::array<double, 6>> strain;    // per element
  std::vector<std::array<double, 6>> stress_mpa;// per element
  std::vector<double> von_mises_mpa;            // per element
  std::vector<Vec3> reaction_n;                 // per node, nonzero only where constrained
  int iterations = 0;                           // 0 when the direct path was used
  double residual = 0.0;
};

}  // namespace scan2sim::fea
