#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scan2sim/aabb_tree.hpp"
#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"
#include "scan2sim/remesh/curvature.hpp"

namespace scan2sim::remesh {

// Incremental isotropic remeshing (split / collapse / flip / tangential relax)
// against a per-vertex sizing field. Edges longer than 4/3 of the local target
// split, shorter than 4/5 collapse, flips chase valence 6, and relaxed vertices
// are projected back onto the input surface. Boundary edges split and collapse
// only along the boundary polyline; boundary vertices never leave it.
// Non-manifold regions are frozen and reported through diagnostics.

struct RemeshResult {
  TriangleMesh mesh;
  std::vector<std::string> diagnostics;
};

namespace detail {

constexpr double kSplitFactor = 4.0 / 3.0;
constexpr double kCollapseFactor = 4.0 / 5.0;

struct EdgeInfo {
  int tri[2] = {-1, -1};
  int count = 0;
};

struct Workspace {
  std::vector<Vec3> pos;
  std::vector<double> target;
  std::vector<uint8_t> frozen;
  std::vector<std::array<int, 3>> tris;  // tris[t][0] < 0 marks a dead triangle

  bool alive(int t) const { return tris[t][0] >= 0; }
};

using EdgeMap = std::unordered_map<uint64_t, EdgeInfo>;

inline uint64_t ekey(int a, int b) { return scan2sim::detail::edge_key(a, b); }

inline EdgeMap build_edges(const Workspace& w, std::vector<uint8_t>& boundary_vertex) {
  EdgeMap edges;
  edges.reserve(w.tris.size() * 2);
  for (size_t t = 0; t < w.tris.size(); ++t) {
    if (!w.alive(static_cast<int>(t))) continue;
    for (int k = 0; k < 3; ++k) {
      auto& info = edges[ekey(w.tris[t][k], w.tris[t][(k + 1) % 3])];
      if (info.count < 2) info.tri[info.count] = static_cast<int>(t);
      info.count++;
    }
  }
  boundary_vertex.assign(w.pos.size(), 0);
  for (const auto& [key, info] : edges) {
    if (info.count == 1) {
      boundary_vertex[static_cast<int>(key >> 32)] = 1;
      boundary_vertex[static_cast<int>(key & 0xffffffffu)] = 1;
    }
  }
  return edges;
}

// Non-manifold edges freeze their endpoints for the remainder of the run.
inline void freeze_nonmanifold(Workspace& w, const EdgeMap& edges,
                               std::vector<std::string>& diagnostics) {
  for (const auto& [key, info] : edges) {
    if (info.count <= 2) continue;
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (!w.frozen[a] || !w.frozen[b])
      diagnostics.push_back("non-manifold edge " + std::to_string(a) + "-" + std::to_string(b) +
                            " frozen");
    w.frozen[a] = w.frozen[b] = 1;
  }
}

inline double edge_target(const Workspace& w, int a, int b) {
  return 0.5 * (w.target[a] + w.target[b]);
}

inline bool split_pass(Workspace& w, std::vector<std::string>& diagnostics) {
  bool any_change = false;
  for (int wave = 0; wave < 10; ++wave) {
    std::vector<uint8_t> boundary;
    EdgeMap edges = build_edges(w, boundary);
    freeze_nonmanifold(w, edges, diagnostics);

    // each triangle votes for its longest over-length edge
    std::unordered_map<int, uint64_t> vote;
    for (size_t t = 0; t < w.tris.size(); ++t) {
      if (!w.alive(static_cast<int>(t))) continue;
      uint64_t best_key = 0;
      double best_len = -1.0;
      for (int k = 0; k < 3; ++k) {
        int a = w.tris[t][k], b = w.tris[t][(k + 1) % 3];
        if (w.frozen[a] || w.frozen[b]) continue;
        if (edges.at(ekey(a, b)).count > 2) continue;
        double len = norm(w.pos[a] - w.pos[b]);
        if (len <= kSplitFactor * edge_target(w, a, b)) continue;
        uint64_t key = ekey(a, b);
        if (len > best_len || (len == best_len && key < best_key)) {
          best_len = len;
          best_key = key;
        }
      }
      if (best_len > 0.0) vote[static_cast<int>(t)] = best_key;
    }
    if (vote.empty()) return any_change;

    // an edge splits only when every adjacent triangle picked it this wave
    std::vector<uint64_t> accepted;
    for (const auto& [key, info] : edges) {
      if (info.count > 2) continue;
      bool all = info.count > 0;
      for (int s = 0; s < info.count; ++s) {
        auto it = vote.find(info.tri[s]);
        all = all && it != vote.end() && it->second == key;
      }
      if (all) accepted.push_back(key);
    }
    if (accepted.empty()) return any_change;
    std::sort(accepted.begin(), accepted.end());

    for (uint64_t key : accepted) {
      int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      const EdgeInfo& info = edges.at(key);
      int mid = static_cast<int>(w.pos.size());
      w.pos.push_back((w.pos[a] + w.pos[b]) * 0.5);
      w.target.push_back(edge_target(w, a, b));
      w.frozen.push_back(0);
      for (int s = 0; s < info.count; ++s) {
        int t = info.tri[s];
        auto tri = w.tris[t];
        for (int k = 0; k < 3; ++k) {
          if (tri[k] == a && tri[(k + 1) % 3] == b) {
            w.tris[t] = {a, mid, tri[(k + 2) % 3]};
            w.tris.push_back({mid, b, tri[(k + 2) % 3]});
            break;
          }
          if (tri[k] == b && tri[(k + 1) % 3] == a) {
            w.tris[t] = {b, mid, tri[(k + 2) % 3]};
            w.tris.push_back({mid, a, tri[(k + 2) % 3]});
            break;
          }
        }
      }
      any_change = true;
    }
  }
  return any_change;
}

inline Vec3 tri_normal(const Workspace& w, const std::array<int, 3>& t) {
  return cross(w.pos[t[1]] - w.pos[t[0]], w.pos[t[2]] - w.pos[t[0]]);
}

inline bool collapse_pass(Workspace& w, std::vector<std::string>& diagnostics) {
  std::vector<uint8_t> boundary;
  EdgeMap edges = build_edges(w, boundary);
  freeze_nonmanifold(w, edges, diagnostics);

  // incidence and adjacency snapshots; staleness is handled via dirty marks
  std::vector<std::vector<int>> tris_of(w.pos.size());
  for (size_t t = 0; t < w.tris.size(); ++t)
    if (w.alive(static_cast<int>(t)))
      for (int v : w.tris[t]) tris_of[v].push_back(static_cast<int>(t));
  std::vector<std::unordered_set<int>> adj(w.pos.size());
  for (const auto& [key, info] : edges) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    adj[a].insert(b);
    adj[b].insert(a);
  }

  std::vector<uint64_t> keys;
  keys.reserve(edges.size());
  for (const auto& [key, info] : edges) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  std::vector<uint8_t> dirty(w.pos.size(), 0);
  bool any_change = false;

  for (uint64_t key : keys) {
    int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffffu);
    const EdgeInfo& info = edges.at(key);
    if (info.count > 2) continue;
    if (w.frozen[u] || w.frozen[v] || dirty[u] || dirty[v]) continue;
    double len = norm(w.pos[u] - w.pos[v]);
    if (len >= kCollapseFactor * edge_target(w, u, v)) continue;

    bool edge_boundary = info.count == 1;
    if (boundary[u] && boundary[v] && !edge_boundary) continue;  // would pinch

    // keep the boundary endpoint; midpoint otherwise (on the polyline for
    // boundary edges, in space for interior ones)
    int keep = u, drop = v;
    Vec3 new_pos;
    if (boundary[u] && !boundary[v]) {
      new_pos = w.pos[u];
    } else if (boundary[v] && !boundary[u]) {
      keep = v;
      drop = u;
      new_pos = w.pos[v];
    } else {
      new_pos = (w.pos[u] + w.pos[v]) * 0.5;
    }

    // link condition: shared neighbors must be exactly the opposite vertices
    std::vector<int> opposite;
    for (int s = 0; s < info.count; ++s)
      for (int x : w.tris[info.tri[s]])
        if (x != u && x != v) opposite.push_back(x);
    int shared = 0;
    bool link_ok = true;
    for (int n : adj[u]) {
      if (n == v || !adj[v].count(n)) continue;
      ++shared;
      if (std::find(opposite.begin(), opposite.end(), n) == opposite.end()) link_ok = false;
    }
    if (!link_ok || shared != static_cast<int>(opposite.size())) continue;

    // no new over-length edges around the merged vertex
    bool too_long = false;
    for (int other : {u, v})
      for (int n : adj[other]) {
        if (n == u || n == v) continue;
        if (norm(new_pos - w.pos[n]) > kSplitFactor * 0.5 * (w.target[keep] + w.target[n]))
          too_long = true;
      }
    if (too_long) continue;

    // fold-over guard on every surviving incident triangle
    bool folds = false;
    for (int other : {u, v}) {
      for (int t : tris_of[other]) {
        if (!w.alive(t)) continue;
        const auto& tri = w.tris[t];
        bool dies = false;
        for (int k = 0; k < 3; ++k)
          dies = dies || (tri[k] == u && (tri[(k + 1) % 3] == v || tri[(k + 2) % 3] == v));
        if (dies) continue;
        Vec3 before = tri_normal(w, tri);
        std::array<int, 3> after_tri = tri;
        Vec3 saved_u = w.pos[u], saved_v = w.pos[v];
        for (int& x : after_tri)
          if (x == drop) x = keep;
        w.pos[keep] = new_pos;
        Vec3 after = tri_normal(w, after_tri);
        w.pos[u] = saved_u;
        w.pos[v] = saved_v;
        if (dot(before, after) <= 0.0) folds = true;
      }
      if (folds) break;
    }
    if (folds) continue;

    // apply
    w.pos[keep] = new_pos;
    w.target[keep] = edge_target(w, u, v);
    for (int t : tris_of[drop]) {
      if (!w.alive(t)) continue;
      auto& tri = w.tris[t];
      bool contains_both = false;
      for (int k = 0; k < 3; ++k)
        if (tri[k] == keep) contains_both = true;
      if (contains_both) {
        tri[0] = -1;  // triangle along the collapsed edge dies
        continue;
      }
      for (int& x : tri)
        if (x == drop) x = keep;
      tris_of[keep].push_back(t);
    }
    dirty[u] = dirty[v] = 1;
    for (int n : adj[u]) dirty[n] = 1;
    for (int n : adj[v]) dirty[n] = 1;
    any_change = true;
  }
  return any_change;
}

inline bool flip_pass(Workspace& w, std::vector<std::string>& diagnostics) {
  std::vector<uint8_t> boundary;
  EdgeMap edges = build_edges(w, boundary);
  freeze_nonmanifold(w, edges, diagnostics);

  std::vector<int> valence(w.pos.size(), 0);
  std::vector<std::unordered_set<int>> adj(w.pos.size());
  for (const auto& [key, info] : edges) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    adj[a].insert(b);
    adj[b].insert(a);
    ++valence[a];
    ++valence[b];
  }

  std::vector<uint64_t> keys;
  keys.reserve(edges.size());
  for (const auto& [key, info] : edges)
    if (info.count == 2) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  std::vector<uint8_t> dirty(w.pos.size(), 0);
  auto deviation = [&](int vert, int delta) {
    int tgt = boundary[vert] ? 4 : 6;
    int d = valence[vert] + delta - tgt;
    return d * d;
  };

  bool any_change = false;
  for (uint64_t key : keys) {
    int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffffu);
    const EdgeInfo& info = edges.at(key);
    if (w.frozen[u] || w.frozen[v] || dirty[u] || dirty[v]) continue;
    int t1 = info.tri[0], t2 = info.tri[1];
    if (!w.alive(t1) || !w.alive(t2)) continue;

    // orient: t1 holds u->v, t2 holds v->u
    auto directed = [&](int t, int a, int b) {
      for (int k = 0; k < 3; ++k)
        if (w.tris[t][k] == a && w.tris[t][(k + 1) % 3] == b) return w.tris[t][(k + 2) % 3];
      return -1;
    };
    int a = directed(t1, u, v);
    int b = directed(t2, v, u);
    if (a < 0 || b < 0) {
      std::swap(t1, t2);
      a = directed(t1, u, v);
      b = directed(t2, v, u);
    }
    if (a < 0 || b < 0) continue;  // inconsistent orientation, leave alone
    if (w.frozen[a] || w.frozen[b] || dirty[a] || dirty[b]) continue;
    if (adj[a].count(b)) continue;  // flip would duplicate edge a-b

    int before = deviation(u, 0) + deviation(v, 0) + deviation(a, 0) + deviation(b, 0);
    int after = deviation(u, -1) + deviation(v, -1) + deviation(a, 1) + deviation(b, 1);
    if (after >= before) continue;

    std::array<int, 3> n1{a, u, b}, n2{a, b, v};
    Vec3 old_avg = normalized(tri_normal(w, w.tris[t1]) + tri_normal(w, w.tris[t2]));
    Vec3 nn1 = normalized(tri_normal(w, n1)), nn2 = normalized(tri_normal(w, n2));
    if (dot(nn1, old_avg) < 0.2 || dot(nn2, old_avg) < 0.2) continue;

    w.tris[t1] = n1;
    w.tris[t2] = n2;
    --valence[u];
    --valence[v];
    ++valence[a];
    ++valence[b];
    adj[a].insert(b);
    adj[b].insert(a);
    adj[u].erase(v);
    adj[v].erase(u);
    dirty[u] = dirty[v] = dirty[a] = dirty[b] = 1;
    any_change = true;
  }
  return any_change;
}

inline void relax_pass(Workspace& w, const AabbTree& surface, const TriangleMesh& original,
                       const std::vector<double>& original_sizing,
                       std::vector<std::string>& diagnostics) {
  std::vector<uint8_t> boundary;
  EdgeMap edges = build_edges(w, boundary);
  freeze_nonmanifold(w, edges, diagnostics);

  std::vector<std::vector<int>> neighbors(w.pos.size());
  for (const auto& [key, info] : edges) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    neighbors[a].push_back(b);
    neighbors[b].push_back(a);
  }
  for (auto& n : neighbors) std::sort(n.begin(), n.end());

  // area-weighted vertex normals from the current triangles
  std::vector<Vec3> normal(w.pos.size(), Vec3{0, 0, 0});
  for (size_t t = 0; t < w.tris.size(); ++t) {
    if (!w.alive(static_cast<int>(t))) continue;
    Vec3 n = tri_normal(w, w.tris[t]);
    for (int v : w.tris[t]) normal[v] += n;
  }

  std::vector<Vec3> next = w.pos;
  for (size_t v = 0; v < w.pos.size(); ++v) {
    if (neighbors[v].empty() || boundary[v] || w.frozen[v]) continue;
    Vec3 q{0, 0, 0};
    for (int n : neighbors[v]) q += w.pos[n];
    q = q / static_cast<double>(neighbors[v].size());
    Vec3 n = normalized(normal[v]);
    Vec3 tangential = q + n * dot(n, w.pos[v] - q);
    next[v] = surface.closest_point(tangential).point;
  }
  w.pos.swap(next);

  // refresh the sizing target from the input field at the projected location
  for (size_t v = 0; v < w.pos.size(); ++v) {
    if (neighbors[v].empty() || w.frozen[v]) continue;
    auto hit = surface.closest_point(w.pos[v]);
    if (hit.triangle < 0) continue;
    const auto& f = original.faces[hit.triangle];
    w.target[v] = hit.barycentric[0] * original_sizing[f[0]] +
                  hit.barycentric[1] * original_sizing[f[1]] +
                  hit.barycentric[2] * original_sizing[f[2]];
  }
}

}  // namespace detail

inline RemeshResult isotropic_remesh(const TriangleMesh& mesh, const SizingField& sizing,
                                     int iterations) {
  mesh.validate();
  if (sizing.target_edge.size() != mesh.vertices.size())
    throw MeshError("sizing field length does not match vertex count");
  for (double t : sizing.target_edge)
    if (!(t > 0.0)) throw MeshError("sizing field must be strictly positive");

  AabbTree surface(mesh);
  detail::Workspace w;
  w.pos = mesh.vertices;
  w.target = sizing.target_edge;
  w.frozen.assign(mesh.vertices.size(), 0);
  w.tris.assign(mesh.faces.begin(), mesh.faces.end());

  RemeshResult result;
  for (int it = 0; it < iterations; ++it) {
    detail::split_pass(w, result.diagnostics);
    // the conservative dirty-marking limits each sweep to an independent set,
    // so sweep to a fixpoint within the iteration
    for (int round = 0; round < 10; ++round)
      if (!detail::collapse_pass(w, result.diagnostics)) break;
    for (int round = 0; round < 10; ++round)
      if (!detail::flip_pass(w, result.diagnostics)) break;
    detail::relax_pass(w, surface, mesh, sizing.target_edge, result.diagnostics);
  }

  // compact: drop dead triangles and unreferenced vertices, preserving order
  std::vector<int> remap(w.pos.size(), -1);
  for (const auto& t : w.tris) {
    if (t[0] < 0) continue;
    for (int v : t) remap[v] = 0;
  }
  int next_id = 0;
  for (size_t v = 0; v < remap.size(); ++v)
    if (remap[v] == 0) remap[v] = next_id++;
  result.mesh.vertices.reserve(next_id);
  for (size_t v = 0; v < remap.size(); ++v)
    if (remap[v] >= 0) result.mesh.vertices.push_back(w.pos[v]);
  for (const auto& t : w.tris) {
    if (t[0] < 0) continue;
    result.mesh.faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  }
  if (result.mesh.faces.empty()) throw MeshError("remeshing consumed the whole mesh");
  return result;
}

}  // namespace scan2sim::remesh
