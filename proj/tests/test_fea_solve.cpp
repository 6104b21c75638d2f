#include <catch2/catch.hpp>

#include <cmath>
#include <map>

#include "scan2sim/fea/solver.hpp"
#include "scan2sim/rng.hpp"
#include "support/fixtures.hpp"

using namespace scan2sim;
using namespace scan2sim::fea;

namespace {

const Material kSpruce{10000.0, 0.3, 4.5e-7};

// Pin two bottom nodes laterally so a z-only support is statically determinate.
void add_lateral_pins(VolumeMesh& m, LoadCase& lc) {
  const auto& bottom = m.node_sets.at("bottom");
  m.node_sets["pin_origin"] = {bottom[0]};
  m.node_sets["pin_axis"] = {bottom[1]};
  lc.constraints.push_back({"pin_origin", {true, true, false}});
  lc.constraints.push_back({"pin_axis", {true, false, false}});
}

Vec3 applied_total(const VolumeMesh& m, const Material& mat, const LoadCase& lc) {
  auto f = assemble_loads(m, mat, lc);
  Vec3 total{0, 0, 0};
  for (int n = 0; n < m.node_count(); ++n)
    for (int d = 0; d < 3; ++d) total[d] += f[3 * n + d];
  return total;
}

}  // namespace

TEST_CASE("assemble: one element equals its element matrix") {
  VolumeMesh m = fixtures::voxel_block(1, 1, 1, 2.0);
  CsrMatrix k = assemble(m, kSpruce);
  auto ke = hex_stiffness(hex_corners(m, m.hex_elements[0]), kSpruce);
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 8; ++b)
        for (int j = 0; j < 3; ++j)
          REQUIRE(k.get(3 * m.hex_elements[0][a] + i, 3 * m.hex_elements[0][b] + j) ==
                  Approx(ke[3 * a + i][3 * b + j]).margin(1e-12));
}

TEST_CASE("assemble: disconnected elements produce a block-diagonal matrix") {
  VolumeMesh m;
  auto block = fixtures::voxel_block(1, 1, 1);
  m.nodes = block.nodes;
  m.hex_elements = block.hex_elements;
  int base = m.node_count();
  for (const auto& n : block.nodes) m.nodes.push_back(n + Vec3{10, 0, 0});
  auto h = block.hex_elements[0];
  for (auto& v : h) v += base;
  m.hex_elements.push_back(h);

  CsrMatrix k = assemble(m, kSpruce);
  for (int i = 0; i < 3 * base; ++i)
    for (int j = 3 * base; j < 3 * m.node_count(); ++j) REQUIRE(k.get(i, j) == 0.0);
}

TEST_CASE("assemble: matrix-vector product matches a dense reference on the 8-hex cube") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 2, 0.5);
  CsrMatrix k = assemble(m, kSpruce);
  int n = 3 * m.node_count();

  // dense assembly oracle
  std::vector<double> dense(static_cast<size_t>(n) * n, 0.0);
  for (const auto& h : m.hex_elements) {
    auto ke = hex_stiffness(hex_corners(m, h), kSpruce);
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i)
        for (int b = 0; b < 8; ++b)
          for (int j = 0; j < 3; ++j)
            dense[static_cast<size_t>(3 * h[a] + i) * n + 3 * h[b] + j] += ke[3 * a + i][3 * b + j];
  }

  Rng rng(17);
  std::vector<double> x(n), y_sparse, y_dense(n, 0.0);
  for (auto& v : x) v = rng.next_double() * 2 - 1;
  k.multiply(x, y_sparse);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += dense[static_cast<size_t>(i) * n + j] * x[j];
    y_dense[i] = acc;
  }
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(y_dense[i]));
  for (int i = 0; i < n; ++i) REQUIRE(std::abs(y_sparse[i] - y_dense[i]) <= 1e-12 * scale);
}

TEST_CASE("global stiffness: PSD quadratic form, zero on rigid translations") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 1);
  CsrMatrix k = assemble(m, kSpruce);
  int n = 3 * m.node_count();
  Rng rng(23);
  std::vector<double> y;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.next_double() * 2 - 1;
    k.multiply(x, y);
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += x[i] * y[i];
    REQUIRE(q >= -1e-10);
  }
  for (int d = 0; d < 3; ++d) {
    std::vector<double> t(n, 0.0);
    for (int node = 0; node < m.node_count(); ++node) t[3 * node + d] = 1.0;
    k.multiply(t, y);
    for (double v : y) REQUIRE(std::abs(v) <= 1e-9 * kSpruce.young_modulus_mpa);
  }
}

TEST_CASE("loads: single 1 mm^3 hex carries its own weight, split over 8 nodes") {
  VolumeMesh m = fixtures::voxel_block(1, 1, 1, 1.0);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  auto f = assemble_loads(m, kSpruce, lc);
  // rho g V in consistent units: 4.5e-10 tonne/mm^3 * 9810 mm/s^2 * 1 mm^3
  double weight = 4.5e-10 * 9810.0;
  double sum = 0.0;
  for (int n = 0; n < m.node_count(); ++n) {
    REQUIRE(f[3 * n] == 0.0);
    REQUIRE(f[3 * n + 1] == 0.0);
    REQUIRE(f[3 * n + 2] == Approx(-weight / 8.0).epsilon(1e-12));
    sum += f[3 * n + 2];
  }
  REQUIRE(sum == Approx(-weight).epsilon(1e-12));
}

TEST_CASE("loads: 500 N over a 9-node set, equal per node") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 2, 0.5);
  REQUIRE(m.node_sets.at("top").size() == 9);
  LoadCase lc;
  lc.surface_loads.push_back({"top", {0, 0, -500.0}, LoadDistribution::EqualPerNode});
  auto f = assemble_loads(m, kSpruce, lc);
  for (int n : m.node_sets.at("top"))
    REQUIRE(f[3 * n + 2] == Approx(-500.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("loads: area-weighted top load gives corner/edge/center nodes 1:2:4 weights") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 1, 1.0);
  LoadCase lc;
  lc.surface_loads.push_back({"top", {0, 0, -900.0}, LoadDistribution::AreaWeighted});
  auto f = assemble_loads(m, kSpruce, lc);
  std::map<double, int> histogram;
  double sum = 0.0;
  for (int n : m.node_sets.at("top")) {
    histogram[std::round(f[3 * n + 2] * 1e9) / 1e9]++;
    sum += f[3 * n + 2];
  }
  REQUIRE(sum == Approx(-900.0).epsilon(1e-12));
  // 4 corners (1 face each), 4 edges (2 faces), 1 center (4 faces): weights 1:2:4
  REQUIRE(histogram.size() == 3);
  REQUIRE(histogram[-56.25] == 4);   // 900 * 1/16
  REQUIRE(histogram[-112.5] == 4);   // 900 * 2/16
  REQUIRE(histogram[-225.0] == 1);   // 900 * 4/16
}

TEST_CASE("loads: zero gravity and no surface loads give the zero vector") {
  VolumeMesh m = fixtures::voxel_block(1, 1, 1);
  LoadCase lc;
  auto f = assemble_loads(m, kSpruce, lc);
  for (double v : f) REQUIRE(v == 0.0);
}

TEST_CASE("solve: uniaxial patch test reproduces the bar solution") {
  // one hex, 10 mm edge, E = 10000, nu = 0; 500 N down on the 4 top nodes
  VolumeMesh m = fixtures::voxel_block(1, 1, 1, 10.0);
  Material mat{10000.0, 0.0, 0.0};
  LoadCase lc;
  lc.constraints.push_back({"bottom", {false, false, true}});
  add_lateral_pins(m, lc);
  lc.surface_loads.push_back({"top", {0, 0, -500.0}, LoadDistribution::EqualPerNode});
  FieldResult r = solve_static(m, mat, lc);

  double delta = 500.0 * 10.0 / (10000.0 * 100.0);  // FL/EA = 5e-3 mm
  for (int n : m.node_sets.at("top"))
    REQUIRE(r.displacement_mm[n].z == Approx(-delta).epsilon(1e-8));
  REQUIRE(r.stress_mpa[0][2] == Approx(-5.0).epsilon(1e-8));  // sigma_zz
  REQUIRE(std::abs(r.stress_mpa[0][0]) < 1e-8);
  REQUIRE(r.von_mises_mpa[0] == Approx(5.0).epsilon(1e-8));
}

TEST_CASE("solve: zero load keeps every field at zero") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 2);
  LoadCase lc;
  lc.constraints.push_back({"bottom", {true, true, true}});
  FieldResult r = solve_static(m, kSpruce, lc);
  for (const auto& u : r.displacement_mm) REQUIRE(norm(u) == 0.0);
  for (double v : r.von_mises_mpa) REQUIRE(v == 0.0);
  for (const auto& rc : r.reaction_n) REQUIRE(norm(rc) == 0.0);
}

TEST_CASE("solve: gravity column matches the analytic self-weight stress") {
  // 20 voxels of 5 mm -> 100 mm column; base element centroid sits at z = 2.5 mm
  VolumeMesh m = fixtures::voxel_block(1, 1, 20, 5.0);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.constraints.push_back({"bottom", {false, false, true}});
  add_lateral_pins(m, lc);
  FieldResult r = solve_static(m, kSpruce, lc);

  double rho = kSpruce.density_consistent();
  double h = 100.0, centroid_z = 2.5;
  double expected = -rho * 9810.0 * (h - centroid_z);  // analytic at the centroid
  REQUIRE(r.stress_mpa[0][2] == Approx(expected).epsilon(0.02));
  // the discretization offset against rho*g*h itself is exactly v/(2h) = 2.5%
  REQUIRE(r.stress_mpa[0][2] == Approx(-rho * 9810.0 * h).epsilon(0.03));
}

TEST_CASE("solve: equilibrium of reactions against applied loads") {
  VolumeMesh m = fixtures::voxel_block(3, 3, 4, 2.0);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.surface_loads.push_back({"top", {120.0, -40.0, -500.0}, LoadDistribution::EqualPerNode});
  lc.constraints.push_back({"bottom", {true, true, true}});
  FieldResult r = solve_static(m, kSpruce, lc);

  Vec3 applied = applied_total(m, kSpruce, lc);
  Vec3 reactions{0, 0, 0};
  for (const auto& v : r.reaction_n) reactions += v;
  double scale = norm(applied);
  for (int d = 0; d < 3; ++d) REQUIRE(std::abs(reactions[d] + applied[d]) <= 1e-8 * scale);
}

TEST_CASE("solve: reactions are zero on unconstrained DOFs") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 2);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.constraints.push_back({"bottom", {false, false, true}});
  add_lateral_pins(m, lc);
  FieldResult r = solve_static(m, kSpruce, lc);
  std::set<int> bottom(m.node_sets.at("bottom").begin(), m.node_sets.at("bottom").end());
  int pin0 = m.node_sets.at("pin_origin")[0], pin1 = m.node_sets.at("pin_axis")[0];
  for (int n = 0; n < m.node_count(); ++n) {
    if (!bottom.count(n)) {
      REQUIRE(norm(r.reaction_n[n]) == 0.0);
    } else if (n != pin0 && n != pin1) {
      REQUIRE(r.reaction_n[n].x == 0.0);  // lateral DOFs are free here
      REQUIRE(r.reaction_n[n].y == 0.0);
    }
  }
}

TEST_CASE("solve: linearity, doubling loads doubles every field") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 3);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.surface_loads.push_back({"top", {30.0, 0.0, -200.0}, LoadDistribution::EqualPerNode});
  lc.constraints.push_back({"bottom", {true, true, true}});
  LoadCase doubled = lc;
  doubled.gravity_mm_s2 = lc.gravity_mm_s2 * 2.0;
  doubled.surface_loads[0].total_force_n = lc.surface_loads[0].total_force_n * 2.0;

  FieldResult a = solve_static(m, kSpruce, lc);
  FieldResult b = solve_static(m, kSpruce, doubled);
  double umax = 0.0;
  for (const auto& u : a.displacement_mm) umax = std::max(umax, norm(u));
  for (int n = 0; n < m.node_count(); ++n)
    REQUIRE(norm(b.displacement_mm[n] - a.displacement_mm[n] * 2.0) <= 1e-9 * umax);
  for (int e = 0; e < m.element_count(); ++e)
    REQUIRE(b.von_mises_mpa[e] == Approx(2.0 * a.von_mises_mpa[e]).epsilon(1e-9));
}

TEST_CASE("solve: rigid translation of mesh and loads leaves displacements unchanged") {
  VolumeMesh m = fixtures::voxel_block(2, 2, 2, 1.5);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.surface_loads.push_back({"top", {25.0, 10.0, -300.0}, LoadDistribution::EqualPerNode});
  lc.constraints.push_back({"bottom", {true, true, true}});
  FieldResult a = solve_static(m, kSpruce, lc);

  VolumeMesh moved = m;
  for (auto& n : moved.nodes) n += Vec3{123.0, -67.0, 41.0};
  FieldResult b = solve_static(moved, kSpruce, lc);

  double umax = 0.0;
  for (const auto& u : a.displacement_mm) umax = std::max(umax, norm(u));
  for (int n = 0; n < m.node_count(); ++n)
    REQUIRE(norm(b.displacement_mm[n] - a.displacement_mm[n]) <= 1e-8 * umax);
}

TEST_CASE("solve: mirror-symmetric model produces mirror-symmetric displacements") {
  VolumeMesh m = fixtures::voxel_block(4, 3, 3, 1.0);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.surface_loads.push_back({"top", {0.0, 0.0, -500.0}, LoadDistribution::EqualPerNode});
  lc.constraints.push_back({"bottom", {true, true, true}});
  FieldResult r = solve_static(m, kSpruce, lc);

  // mirror plane x = 2: map each node to its reflection
  std::map<std::array<double, 3>, int> index;
  for (int n = 0; n < m.node_count(); ++n)
    index[{m.nodes[n].x, m.nodes[n].y, m.nodes[n].z}] = n;
  double umax = 0.0;
  for (const auto& u : r.displacement_mm) umax = std::max(umax, norm(u));
  for (int n = 0; n < m.node_count(); ++n) {
    Vec3 p = m.nodes[n];
    int mirror = index.at({4.0 - p.x, p.y, p.z});
    REQUIRE(std::abs(r.displacement_mm[n].x + r.displacement_mm[mirror].x) <= 1e-8 * umax);
    REQUIRE(std::abs(r.displacement_mm[n].y - r.displacement_mm[mirror].y) <= 1e-8 * umax);
    REQUIRE(std::abs(r.displacement_mm[n].z - r.displacement_mm[mirror].z) <= 1e-8 * umax);
  }

  // symmetric supports must carry the load without lateral imbalance
  Vec3 sum{0, 0, 0};
  for (const auto& v : r.reaction_n) sum += v;
  REQUIRE(std::abs(sum.x) < 1e-8 * 500.0);
  REQUIRE(std::abs(sum.y) < 1e-8 * 500.0);
}

TEST_CASE("solve: under-constrained systems are rejected") {
  VolumeMesh m = fixtures::voxel_block(1, 1, 1);
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  SECTION("no constraints at all") {
    REQUIRE_THROWS_AS(solve_static(m, kSpruce, lc), MeshError);
  }
  SECTION("translations fixed but rotation free") {
    m.node_sets["one_node"] = {0};
    lc.constraints.push_back({"one_node", {true, true, true}});
    REQUIRE_THROWS_AS(solve_static(m, kSpruce, lc), MeshError);
  }
}

TEST_CASE("solve: iterative path converges below 1e-10 and matches Cholesky") {
  VolumeMesh m = fixtures::voxel_block(3, 3, 3, 1.0);  // 192 DOFs free -> both paths viable
  LoadCase lc;
  lc.gravity_mm_s2 = {0, 0, -9810.0};
  lc.surface_loads.push_back({"top", {0, 0, -500.0}, LoadDistribution::EqualPerNode});
  lc.constraints.push_back({"bottom", {true, true, true}});

  SolveSettings direct;
  direct.direct_dof_limit = 1 << 20;
  SolveSettings iterative;
  iterative.direct_dof_limit = 0;

  FieldResult a = solve_static(m, kSpruce, lc, direct);
  FieldResult b = solve_static(m, kSpruce, lc, iterative);
  REQUIRE(b.iterations > 0);
  REQUIRE(b.residual <= 1e-10);
  double umax = 0.0;
  for (const auto& u : a.displacement_mm) umax = std::max(umax, norm(u));
  for (int n = 0; n < m.node_count(); ++n)
    REQUIRE(norm(a.displacement_mm[n] - b.displacement_mm[n]) <= 1e-7 * umax);
}

TEST_CASE("element_to_nodal: constants, single element, equal-volume average") {
  VolumeMesh m = fixtures::voxel_block(2, 1, 1);
  SECTION("constant field stays constant") {
    ScalarField f{"c", FieldAssociation::PerElement, {3.5, 3.5}};
    auto nodal = element_to_nodal(f, m);
    for (double v : nodal.values) REQUIRE(v == Approx(3.5).margin(1e-12));
  }
  SECTION("shared-face nodes get the mean of two equal-volume elements") {
    ScalarField f{"c", FieldAssociation::PerElement, {1.0, 3.0}};
    auto nodal = element_to_nodal(f, m);
    for (int n = 0; n < m.node_count(); ++n) {
      double x = m.nodes[n].x;
      double expect = x == 1.0 ? 2.0 : (x == 0.0 ? 1.0 : 3.0);
      REQUIRE(nodal.values[n] == Approx(expect).margin(1e-12));
    }
  }
  SECTION("orphan node reports a diagnostic and gets zero") {
    m.nodes.push_back({99, 99, 99});
    ScalarField f{"c", FieldAssociation::PerElement, {1.0, 3.0}};
    std::vector<std::string> warnings;
    auto nodal = element_to_nodal(f, m, &warnings);
    REQUIRE(nodal.values.back() == 0.0);
    REQUIRE(warnings.size() == 1);
  }
}
