#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "scan2sim/fea/element.hpp"
#include "scan2sim/fea/model.hpp"
#include "scan2sim/fea/sparse.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::fea {

namespace detail {

inline std::vector<std::vector<int>> dof_pattern(const VolumeMesh& mesh) {
  int nn = mesh.node_count();
  std::vector<std::set<int>> node_adj(nn);
  auto couple = [&](const int* nodes, int count) {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) node_adj[nodes[i]].insert(nodes[j]);
  };
  for (const auto& h : mesh.hex_elements) couple(h.data(), 8);
  for (const auto& t : mesh.tet_elements) couple(t.data(), 4);

  std::vector<std::vector<int>> pattern(3 * nn);
  for (int n = 0; n < nn; ++n) {
    for (int d = 0; d < 3; ++d) {
      auto& row = pattern[3 * n + d];
      row.reserve(node_adj[n].size() * 3);
      for (int m : node_adj[n])
        for (int e = 0; e < 3; ++e) row.push_back(3 * m + e);
    }
  }
  return pattern;
}

template <int N>
inline void scatter(CsrMatrix& k, const ElementMatrix<N>& ke, const int* nodes) {
  constexpr int count = N / 3;
  for (int a = 0; a < count; ++a)
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < count; ++b)
        for (int j = 0; j < 3; ++j)
          k.add(3 * nodes[a] + i, 3 * nodes[b] + j, ke[3 * a + i][3 * b + j]);
}

}  // namespace detail

// Global stiffness: standard scatter-add of element matrices, 3 DOFs per node.
inline CsrMatrix assemble(const VolumeMesh& mesh, const Material& material) {
  mesh.validate();
  CsrMatrix k(detail::dof_pattern(mesh));
  for (size_t e = 0; e < mesh.hex_elements.size(); ++e) {
    try {
      detail::scatter<24>(k, hex_stiffness(hex_corners(mesh, mesh.hex_elements[e]), material),
                          mesh.hex_elements[e].data());
    } catch (const MeshError& err) {
      throw MeshError("hex element " + std::to_string(e) + ": " + err.what());
    }
  }
  for (size_t e = 0; e < mesh.tet_elements.size(); ++e) {
    const auto& t = mesh.tet_elements[e];
    std::array<Vec3, 4> c{mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], mesh.nodes[t[3]]};
    try {
      detail::scatter<12>(k, tet_stiffness(c, material), t.data());
    } catch (const MeshError& err) {
      throw MeshError("tet element " + std::to_string(e) + ": " + err.what());
    }
  }
  return k;
}

// Nodal force vector: lumped self-weight plus the surface loads distributed over
// their node sets. For constant body force the equal-per-node lump coincides
// with the consistent load of both element types.
inline std::vector<double> assemble_loads(const VolumeMesh& mesh, const Material& material,
                                          const LoadCase& load) {
  load.validate(mesh);
  std::vector<double> f(3 * mesh.node_count(), 0.0);
  double rho = material.density_consistent();
  if (rho > 0.0 && norm2(load.gravity_mm_s2) > 0.0) {
    auto add_gravity = [&](const int* nodes, int count, double volume) {
      Vec3 per_node = load.gravity_mm_s2 * (rho * volume / count);
      for (int a = 0; a < count; ++a)
        for (int d = 0; d < 3; ++d) f[3 * nodes[a] + d] += per_node[d];
    };
    for (const auto& h : mesh.hex_elements)
      add_gravity(h.data(), 8, hex_volume(hex_corners(mesh, h)));
    for (const auto& t : mesh.tet_elements)
      add_gravity(t.data(), 4,
                  tet_signed_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                    mesh.nodes[t[3]]));
  }

  for (const auto& sl : load.surface_loads) {
    const auto& ids = mesh.node_sets.at(sl.node_set);
    if (ids.empty()) throw MeshError("surface load on empty node set '" + sl.node_set + "'");
    std::vector<double> weight(ids.size(), 1.0);
    if (sl.distribution == LoadDistribution::AreaWeighted) {
      // tributary areas from exterior faces whose corners all belong to the set
      std::set<int> members(ids.begin(), ids.end());
      std::vector<double> area_of_node(mesh.node_count(), 0.0);
      for (const auto& face : extract_boundary_faces(mesh)) {
        int corners = face[3] < 0 ? 3 : 4;
        bool all_in = true;
        for (int k = 0; k < corners; ++k) all_in = all_in && members.count(face[k]) > 0;
        if (!all_in) continue;
        double a = triangle_area(mesh.nodes[face[0]], mesh.nodes[face[1]], mesh.nodes[face[2]]);
        if (corners == 4)
          a += triangle_area(mesh.nodes[face[0]], mesh.nodes[face[2]], mesh.nodes[face[3]]);
        for (int k = 0; k < corners; ++k) area_of_node[face[k]] += a / corners;
      }
      double total = 0.0;
      for (size_t i = 0; i < ids.size(); ++i) {
        weight[i] = area_of_node[ids[i]];
        total += weight[i];
      }
      if (total <= 0.0)
        throw MeshError("area-weighted load: node set '" + sl.node_set +
                        "' spans no exterior faces");
    }
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    for (size_t i = 0; i < ids.size(); ++i) {
      Vec3 share = sl.total_force_n * (weight[i] / wsum);
      for (int d = 0; d < 3; ++d) f[3 * ids[i] + d] += share[d];
    }
  }
  return f;
}

inline std::vector<uint8_t> free_dof_mask(const VolumeMesh& mesh, const LoadCase& load) {
  std::vector<uint8_t> free(3 * mesh.node_count(), 1);
  for (const auto& c : load.constraints)
    for (int n : mesh.node_sets.at(c.node_set))
      for (int d = 0; d < 3; ++d)
        if (c.fixed_dof[d]) free[3 * n + d] = 0;
  return free;
}

struct SolveSettings {
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 0;       // 0 = auto
  int direct_dof_limit = 1200;     // reduced systems at or below go through Cholesky
};

// Linear-elastic static solve: eliminate constrained DOFs, solve the reduced SPD
// system (Cholesky when small, Jacobi-PCG otherwise), then recover element
// strain/stress at centers, von Mises, and reactions at the constrained DOFs.
inline FieldResult solve_static(const VolumeMesh& mesh, const Material& material,
                                const LoadCase& load, const SolveSettings& settings = {}) {
  load.validate(mesh);
  CsrMatrix k = assemble(mesh, material);
  std::vector<double> f = assemble_loads(mesh, material, load);

  std::vector<uint8_t> free = free_dof_mask(mesh, load);
  int64_t fixed_count = std::count(free.begin(), free.end(), uint8_t{0});
  if (fixed_count < 3)
    throw MeshError("constraints insufficient to remove rigid-body modes");

  std::vector<int> full_to_reduced;
  CsrMatrix k_red = k.restricted(free, full_to_reduced);
  std::vector<double> b(k_red.rows());
  for (size_t i = 0; i < free.size(); ++i)
    if (free[i]) b[full_to_reduced[i]] = f[i];

  FieldResult result;
  std::vector<double> u_red;
  if (k_red.rows() <= settings.direct_dof_limit) {
    DenseCholesky chol(k_red);
    u_red = chol.solve(b);
    // report the true relative residual of the direct solve
    std::vector<double> r(k_red.rows());
    k_red.multiply(u_red, r);
    double nb = 0.0, nr = 0.0;
    for (int i = 0; i < k_red.rows(); ++i) {
      nb += b[i] * b[i];
      nr += (r[i] - b[i]) * (r[i] - b[i]);
    }
    result.residual = nb > 0 ? std::sqrt(nr / nb) : 0.0;
    result.iterations = 0;
  } else {
    CgResult cg = conjugate_gradient(k_red, b, u_red, settings.cg_tolerance,
                                     settings.cg_max_iterations);
    if (!cg.converged)
      throw MeshError("conjugate gradient did not converge (residual " +
                      std::to_string(cg.relative_residual) + " after " +
                      std::to_string(cg.iterations) + " iterations)");
    result.iterations = cg.iterations;
    result.residual = cg.relative_residual;
  }

  int nn = mesh.node_count();
  std::vector<double> u(3 * nn, 0.0);
  for (size_t i = 0; i < free.size(); ++i)
    if (free[i]) u[i] = u_red[full_to_reduced[i]];

  result.displacement_mm.resize(nn);
  for (int n = 0; n < nn; ++n)
    result.displacement_mm[n] = {u[3 * n], u[3 * n + 1], u[3 * n + 2]};

  // element recovery at centers
  Mat6 d = elasticity_matrix(material);
  int ne = mesh.element_count();
  result.strain.resize(ne);
  result.stress_mpa.resize(ne);
  result.von_mises_mpa.resize(ne);
  int nh = static_cast<int>(mesh.hex_elements.size());
  for (int e = 0; e < ne; ++e) {
    std::array<double, 6> eps;
    if (e < nh) {
      const auto& h = mesh.hex_elements[e];
      std::array<Vec3, 8> du;
      for (int a = 0; a < 8; ++a) du[a] = result.displacement_mm[h[a]];
      eps = hex_center_strain(hex_corners(mesh, h), du);
    } else {
      const auto& t = mesh.tet_elements[e - nh];
      std::array<Vec3, 4> c{mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], mesh.nodes[t[3]]};
      std::array<Vec3, 4> du;
      for (int a = 0; a < 4; ++a) du[a] = result.displacement_mm[t[a]];
      eps = tet_strain(c, du);
    }
    result.strain[e] = eps;
    result.stress_mpa[e] = stress_from_strain(d, eps);
    result.von_mises_mpa[e] = von_mises(result.stress_mpa[e]);
  }

  // reactions r = K u - f on constrained DOFs
  std::vector<double> ku;
  k.multiply(u, ku);
  result.reaction_n.assign(nn, Vec3{0, 0, 0});
  for (int n = 0; n < nn; ++n)
    for (int dof = 0; dof < 3; ++dof)
      if (!free[3 * n + dof]) result.reaction_n[n][dof] = ku[3 * n + dof] - f[3 * n + dof];
  return result;
}

// Volume-weighted transfer of an element field to nodes; orphan nodes get zero.
inline ScalarField element_to_nodal(const ScalarField& field, const VolumeMesh& mesh,
                                    std::vector<std::string>* warnings = nullptr) {
  if (field.association != FieldAssociation::PerElement)
    throw MeshError("element_to_nodal expects a per-element field");
  if (field.values.size() != static_cast<size_t>(mesh.element_count()))
    throw MeshError("element_to_nodal: field length does not match element count");

  std::vector<double> weighted(mesh.node_count(), 0.0), weights(mesh.node_count(), 0.0);
  auto accumulate = [&](const int* nodes, int count, double volume, double value) {
    for (int a = 0; a < count; ++a) {
      weighted[nodes[a]] += volume * value;
      weights[nodes[a]] += volume;
    }
  };
  int nh = static_cast<int>(mesh.hex_elements.size());
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (e < nh) {
      accumulate(mesh.hex_elements[e].data(), 8, hex_volume(hex_corners(mesh, mesh.hex_elements[e])),
                 field.values[e]);
    } else {
      const auto& t = mesh.tet_elements[e - nh];
      accumulate(t.data(), 4,
                 tet_signed_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                   mesh.nodes[t[3]]),
                 field.values[e]);
    }
  }
  ScalarField out{field.name, FieldAssociation::PerNode, std::vector<double>(mesh.node_count())};
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (weights[n] > 0.0) {
      out.values[n] = weighted[n] / weights[n];
    } else {
      out.values[n] = 0.0;
      if (warnings) warnings->push_back("node " + std::to_string(n) + " has no adjacent element");
    }
  }
  return out;
}

}  // namespace scan2sim::fea
