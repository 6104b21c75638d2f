#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::remesh {

// Pairs adjacent triangles into quads by greedy maximum-weight matching over the
// dual graph, followed by alternating-path augmentation to shrink the unmatched
// remainder. The pair weight favors planar, square-like unions. Every input
// triangle ends up in exactly one quad or survives as a triangle:
// 2 * |quads| + |triangles out| = |triangles in|.

namespace detail {

struct PairCandidate {
  uint64_t edge_key = 0;
  int tri[2] = {-1, -1};
  std::array<int, 4> quad{};  // merged corner loop
  double weight = 0.0;
};

inline double angle_quality(const std::array<Vec3, 4>& c) {
  double worst = 1.0;
  for (int k = 0; k < 4; ++k) {
    const Vec3& prev = c[(k + 3) % 4];
    const Vec3& at = c[k];
    const Vec3& next = c[(k + 1) % 4];
    Vec3 u = prev - at, v = next - at;
    double nu = norm(u), nv = norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    double angle = std::acos(std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0)) * 180.0 /
                   3.14159265358979323846;
    worst = std::min(worst, 1.0 - std::abs(angle - 90.0) / 90.0);
  }
  return std::max(0.0, worst);
}

// Quad corner loop for triangles (u,v,c) and (v,u,d) sharing edge u-v: walk the
// outer boundary v -> c -> u -> d.
inline std::array<int, 4> merged_quad(const std::array<int, 3>& t1, const std::array<int, 3>& t2,
                                      int u, int v) {
  int c = -1, d = -1;
  for (int x : t1)
    if (x != u && x != v) c = x;
  for (int x : t2)
    if (x != u && x != v) d = x;
  // orient so the loop follows t1's winding: t1 must traverse u->v
  bool t1_forward = false;
  for (int k = 0; k < 3; ++k)
    if (t1[k] == u && t1[(k + 1) % 3] == v) t1_forward = true;
  if (!t1_forward) std::swap(u, v);
  return {v, c, u, d};
}

}  // namespace detail

inline QuadDominantMesh pair_to_quads(const TriangleMesh& mesh) {
  mesh.validate();
  int nt = mesh.face_count();

  // dual edges: interior manifold edges shared by exactly two triangles
  std::unordered_map<uint64_t, std::array<int, 3>> edge_tris;  // [t0, t1, count]
  edge_tris.reserve(nt * 3);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) {
      auto& rec = edge_tris[scan2sim::detail::edge_key(mesh.faces[t][k], mesh.faces[t][(k + 1) % 3])];
      if (rec[2] < 2) rec[rec[2]] = t;
      rec[2]++;
    }

  std::vector<detail::PairCandidate> candidates;
  std::unordered_map<uint64_t, double> weight_of_edge;
  for (const auto& [key, rec] : edge_tris) {
    if (rec[2] != 2) continue;
    int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffffu);
    detail::PairCandidate cand;
    cand.edge_key = key;
    cand.tri[0] = rec[0];
    cand.tri[1] = rec[1];
    cand.quad = detail::merged_quad(mesh.faces[rec[0]], mesh.faces[rec[1]], u, v);
    std::array<Vec3, 4> corners;
    for (int k = 0; k < 4; ++k) corners[k] = mesh.vertices[cand.quad[k]];
    double planarity =
        std::max(0.0, dot(normalized(mesh.face_normal(rec[0])), normalized(mesh.face_normal(rec[1]))));
    cand.weight = planarity * detail::angle_quality(corners);
    if (cand.weight <= 0.0) continue;
    weight_of_edge[key] = cand.weight;
    candidates.push_back(cand);
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const detail::PairCandidate& a, const detail::PairCandidate& b) {
              return a.weight > b.weight || (a.weight == b.weight && a.edge_key < b.edge_key);
            });

  // greedy phase
  std::vector<int> match(nt, -1);
  std::vector<int> matched_via(nt, -1);  // candidate index used
  for (size_t c = 0; c < candidates.size(); ++c) {
    const auto& cand = candidates[c];
    if (match[cand.tri[0]] >= 0 || match[cand.tri[1]] >= 0) continue;
    match[cand.tri[0]] = cand.tri[1];
    match[cand.tri[1]] = cand.tri[0];
    matched_via[cand.tri[0]] = static_cast<int>(c);
    matched_via[cand.tri[1]] = static_cast<int>(c);
  }

  // alternating-path augmentation (Kuhn-style DFS) to shrink the unmatched
  // remainder; candidate lists stay weight-sorted so re-pairings prefer good
  // quads. Blossom contraction is deliberately omitted; the few odd-cycle
  // cases it would recover do not matter at the quad-fraction level.
  std::vector<std::vector<int>> cands_of(nt);
  for (size_t c = 0; c < candidates.size(); ++c) {
    cands_of[candidates[c].tri[0]].push_back(static_cast<int>(c));
    cands_of[candidates[c].tri[1]].push_back(static_cast<int>(c));
  }
  for (auto& list : cands_of)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return candidates[a].weight > candidates[b].weight ||
             (candidates[a].weight == candidates[b].weight &&
              candidates[a].edge_key < candidates[b].edge_key);
    });

  std::vector<uint8_t> visited(nt, 0);
  // every expanded vertex is marked (both path parities); keeps the matching
  // consistent on odd cycles at the cost of missing some blossom-only paths
  auto try_augment = [&](auto&& self, int t) -> bool {
    visited[t] = 1;
    for (int ci : cands_of[t]) {
      const auto& cand = candidates[ci];
      int u = cand.tri[0] == t ? cand.tri[1] : cand.tri[0];
      if (visited[u]) continue;
      visited[u] = 1;
      if (match[u] < 0 || (!visited[match[u]] && self(self, match[u]))) {
        match[t] = u;
        match[u] = t;
        matched_via[t] = matched_via[u] = ci;
        return true;
      }
    }
    return false;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (int t = 0; t < nt; ++t) {
      if (match[t] >= 0) continue;
      std::fill(visited.begin(), visited.end(), 0);
      if (try_augment(try_augment, t)) grew = true;
    }
  }

  QuadDominantMesh out;
  out.vertices = mesh.vertices;
  for (int t = 0; t < nt; ++t) {
    if (match[t] < 0) {
      out.triangles.push_back(mesh.faces[t]);
    } else if (match[t] > t) {
      out.quads.push_back(candidates[matched_via[t]].quad);
    }
  }
  return out;
}

}  // namespace scan2sim::remesh
