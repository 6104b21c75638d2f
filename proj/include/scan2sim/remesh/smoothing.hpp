#pragma once

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::remesh {

namespace detail {

struct NeighborTable {
  std::vector<std::vector<int>> neighbors;
  std::vector<uint8_t> boundary;
};

template <typename FaceRange3, typename FaceRange4>
inline NeighborTable build_neighbors(int vertex_count, const FaceRange3& triangles,
                                     const FaceRange4& quads) {
  std::unordered_map<uint64_t, int> edge_use;
  auto feed = [&](int a, int b) { edge_use[scan2sim::detail::edge_key(a, b)]++; };
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) feed(t[k], t[(k + 1) % 3]);
  for (const auto& q : quads)
    for (int k = 0; k < 4; ++k) feed(q[k], q[(k + 1) % 4]);

  NeighborTable table;
  table.neighbors.resize(vertex_count);
  table.boundary.assign(vertex_count, 0);
  for (const auto& [key, count] : edge_use) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    table.neighbors[a].push_back(b);
    table.neighbors[b].push_back(a);
    if (count == 1) table.boundary[a] = table.boundary[b] = 1;
  }
  for (auto& n : table.neighbors) std::sort(n.begin(), n.end());
  return table;
}

// Jacobi relaxation toward the uniform neighbor average. Boundary positions are
// left bitwise untouched when preserve_boundary is set.
inline void smooth_positions(std::vector<Vec3>& positions, const NeighborTable& table,
                             int iterations, double lambda, bool preserve_boundary) {
  if (iterations < 0) throw MeshError("smoothing iterations must be >= 0");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw MeshError("smoothing lambda must lie in (0, 1]");
  std::vector<Vec3> next = positions;
  for (int it = 0; it < iterations; ++it) {
    for (size_t v = 0; v < positions.size(); ++v) {
      const auto& nb = table.neighbors[v];
      if (nb.empty() || (preserve_boundary && table.boundary[v])) continue;
      Vec3 mean{0, 0, 0};
      for (int n : nb) mean += positions[n];
      mean = mean / static_cast<double>(nb.size());
      next[v] = positions[v] + (mean - positions[v]) * lambda;
    }
    positions.swap(next);
    next = positions;
  }
}

}  // namespace detail

inline TriangleMesh laplacian_smooth(const TriangleMesh& mesh, int iterations, double lambda,
                                     bool preserve_boundary = true) {
  mesh.validate();
  TriangleMesh out = mesh;
  auto table = detail::build_neighbors(mesh.vertex_count(), mesh.faces,
                                       std::vector<std::array<int, 4>>{});
  detail::smooth_positions(out.vertices, table, iterations, lambda, preserve_boundary);
  return out;
}

inline QuadDominantMesh laplacian_smooth(const QuadDominantMesh& mesh, int iterations,
                                         double lambda, bool preserve_boundary = true) {
  mesh.validate();
  QuadDominantMesh out = mesh;
  auto table = detail::build_neighbors(mesh.vertex_count(), mesh.triangles, mesh.quads);
  detail::smooth_positions(out.vertices, table, iterations, lambda, preserve_boundary);
  return out;
}

}  // namespace scan2sim::remesh
