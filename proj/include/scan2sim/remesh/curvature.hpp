#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::remesh {

struct CurvatureEstimate {
  std::vector<double> mean_abs;  // |H| per vertex, 1/mm
  std::vector<std::string> warnings;
};

// Discrete absolute mean curvature via the cotangent Laplacian with mixed
// Voronoi areas (Meyer et al.). Boundary vertices inherit the value of their
// nearest interior neighbor; non-manifold or degenerate one-rings get zero.
inline CurvatureEstimate estimate_curvature(const TriangleMesh& mesh) {
  mesh.validate();
  int nv = mesh.vertex_count();
  CurvatureEstimate est;
  est.mean_abs.assign(nv, 0.0);

  std::unordered_map<uint64_t, int> edge_use;
  edge_use.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) edge_use[detail::edge_key(f[k], f[(k + 1) % 3])]++;

  std::vector<uint8_t> boundary(nv, 0), nonmanifold(nv, 0);
  for (const auto& [key, count] : edge_use) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (count == 1) boundary[a] = boundary[b] = 1;
    if (count > 2) nonmanifold[a] = nonmanifold[b] = 1;
  }

  std::vector<Vec3> laplace(nv, Vec3{0, 0, 0});
  std::vector<double> mixed_area(nv, 0.0);
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    double area = triangle_area(a, b, c);
    if (area <= 0.0) continue;  // flagged below through zero mixed area

    const Vec3* p[3] = {&a, &b, &c};
    double cot[3];  // cotangent of the angle at each corner
    bool obtuse[3];
    for (int k = 0; k < 3; ++k) {
      Vec3 u = *p[(k + 1) % 3] - *p[k], v = *p[(k + 2) % 3] - *p[k];
      double d = dot(u, v);
      cot[k] = d / (2.0 * area);  // |u x v| = 2 area
      obtuse[k] = d < 0.0;
    }
    bool any_obtuse = obtuse[0] || obtuse[1] || obtuse[2];
    for (int k = 0; k < 3; ++k) {
      int i = f[k], j1 = f[(k + 1) % 3], j2 = f[(k + 2) % 3];
      // cot at corner k weights the edge j1-j2 (opposite); the Laplacian at i
      // instead collects cot weights of the angles opposite to its edges:
      laplace[i] += (mesh.vertices[j1] - mesh.vertices[i]) * cot[(k + 2) % 3];
      laplace[i] += (mesh.vertices[j2] - mesh.vertices[i]) * cot[(k + 1) % 3];
      if (!any_obtuse) {
        double e1 = norm2(mesh.vertices[j1] - mesh.vertices[i]);
        double e2 = norm2(mesh.vertices[j2] - mesh.vertices[i]);
        mixed_area[i] += (e1 * cot[(k + 2) % 3] + e2 * cot[(k + 1) % 3]) / 8.0;
      } else {
        mixed_area[i] += obtuse[k] ? area / 2.0 : area / 4.0;
      }
    }
  }

  for (int v = 0; v < nv; ++v) {
    if (nonmanifold[v]) {
      est.mean_abs[v] = 0.0;
      est.warnings.push_back("vertex " + std::to_string(v) + " is non-manifold; curvature set to 0");
      continue;
    }
    if (boundary[v]) continue;  // filled from interior below
    if (mixed_area[v] <= 0.0) {
      est.mean_abs[v] = 0.0;
      est.warnings.push_back("vertex " + std::to_string(v) + " has a degenerate one-ring");
      continue;
    }
    // mean curvature normal K = laplace / (2 A); H = |K| / 2
    est.mean_abs[v] = norm(laplace[v]) / (4.0 * mixed_area[v]);
  }

  // boundary vertices: breadth-first to the nearest interior vertex (ties by index)
  bool any_boundary = std::any_of(boundary.begin(), boundary.end(), [](uint8_t b) { return b != 0; });
  if (any_boundary) {
    std::vector<std::vector<int>> neighbors(nv);
    for (const auto& [key, count] : edge_use) {
      int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      neighbors[a].push_back(b);
      neighbors[b].push_back(a);
    }
    for (auto& n : neighbors) std::sort(n.begin(), n.end());

    for (int v = 0; v < nv; ++v) {
      if (!boundary[v] || nonmanifold[v]) continue;
      std::vector<uint8_t> seen(nv, 0);
      std::deque<int> queue{v};
      seen[v] = 1;
      int found = -1;
      while (!queue.empty() && found < 0) {
        int cur = queue.front();
        queue.pop_front();
        for (int nb : neighbors[cur]) {
          if (seen[nb]) continue;
          if (!boundary[nb] && !nonmanifold[nb]) {
            found = nb;
            break;
          }
          seen[nb] = 1;
          queue.push_back(nb);
        }
      }
      est.mean_abs[v] = found >= 0 ? est.mean_abs[found] : 0.0;
    }
  }
  return est;
}

struct SizingField {
  std::vector<double> target_edge;  // mm, per vertex
};

// size(v) = clamp(max_edge / (1 + sensitivity * curvature * max_edge), min, max):
// flat regions run at max_edge, high curvature regions shrink toward min_edge.
inline SizingField compute_sizing(const CurvatureEstimate& curvature, double min_edge,
                                  double max_edge, double sensitivity) {
  if (!(0.0 < min_edge && min_edge < max_edge))
    throw MeshError("sizing requires 0 < min_edge < max_edge");
  if (!(sensitivity > 0.0 && sensitivity <= 1.0))
    throw MeshError("sizing sensitivity must lie in (0, 1]");
  SizingField field;
  field.target_edge.reserve(curvature.mean_abs.size());
  for (double c : curvature.mean_abs) {
    double size = max_edge / (1.0 + sensitivity * c * max_edge);
    field.target_edge.push_back(std::clamp(size, min_edge, max_edge));
  }
  return field;
}

}  // namespace scan2sim::remesh
