#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "scan2sim/core.hpp"

namespace scan2sim {

// Surface mesh as produced by the reconstruction stage. Coordinates in mm.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> normals;  // optional, per vertex, unit length

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  Aabb bounds() const {
    Aabb box;
    for (const auto& v : vertices) box.expand(v);
    return box;
  }

  double total_area() const {
    double a = 0.0;
    for (const auto& f : faces) a += triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
    return a;
  }

  Vec3 face_normal(int f) const {
    const auto& t = faces[f];
    return normalized(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
  }

  void validate() const {
    if (vertices.empty() || faces.empty()) throw MeshError("empty mesh");
    int n = vertex_count();
    for (size_t i = 0; i < faces.size(); ++i) {
      const auto& f = faces[i];
      for (int k = 0; k < 3; ++k)
        if (f[k] < 0 || f[k] >= n)
          throw MeshError("face " + std::to_string(i) + " references vertex " +
                          std::to_string(f[k]) + " out of range [0," + std::to_string(n) + ")");
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
        throw MeshError("face " + std::to_string(i) + " repeats a vertex");
    }
    if (!normals.empty() && normals.size() != vertices.size())
      throw MeshError("normal count does not match vertex count");
  }
};

// Mostly-quad surface produced by remeshing; leftover triangles are kept as is.
struct QuadDominantMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> quads;
  std::vector<std::array<int, 3>> triangles;

  int vertex_count() const { return static_cast<int>(vertices.size()); }

  double quad_fraction() const {
    double total = static_cast<double>(quads.size() + triangles.size());
    return total == 0.0 ? 0.0 : static_cast<double>(quads.size()) / total;
  }

  void validate() const {
    if (vertices.empty()) throw MeshError("empty mesh");
    int n = vertex_count();
    auto check = [&](const int* ids, int k, size_t which) {
      for (int i = 0; i < k; ++i) {
        if (ids[i] < 0 || ids[i] >= n)
          throw MeshError("element " + std::to_string(which) + " index out of range");
        for (int j = i + 1; j < k; ++j)
          if (ids[i] == ids[j]) throw MeshError("element " + std::to_string(which) + " repeats a vertex");
      }
    };
    for (size_t i = 0; i < quads.size(); ++i) check(quads[i].data(), 4, i);
    for (size_t i = 0; i < triangles.size(); ++i) check(triangles[i].data(), 3, i);
  }
};

// Hex8/tet4 volume mesh with named node and element sets for loads and constraints.
// Hex corner order: bottom face (n0..n3) counter-clockwise seen from +z, then the
// top face (n4..n7) directly above, matching VTK type 12 and Abaqus C3D8.
struct VolumeMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 8>> hex_elements;
  std::vector<std::array<int, 4>> tet_elements;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> element_sets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(hex_elements.size() + tet_elements.size()); }

  Aabb bounds() const {
    Aabb box;
    for (const auto& v : nodes) box.expand(v);
    return box;
  }

  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> points;
  int size() const { return static_cast<int>(points.size()); }
};

enum class FieldAssociation { PerNode, PerElement };

struct ScalarField {
  std::string name;
  FieldAssociation association = FieldAssociation::PerNode;
  std::vector<double> values;
};

struct VectorField {
  std::string name;
  FieldAssociation association = FieldAssociation::PerNode;
  std::vector<Vec3> values;
};

inline double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(cross(b - a, c - a), d - a) / 6.0;
}

// Hex volume via the 6-tet fan around the 0-6 diagonal. Exact for the axis-aligned
// voxel bricks this pipeline produces; chords bilinear faces of warped imports.
inline double hex_volume(const std::array<Vec3, 8>& c) {
  auto tet = [&](int i, int j, int k, int l) {
    return tet_signed_volume(c[i], c[j], c[k], c[l]);
  };
  return tet(0, 1, 2, 6) + tet(0, 2, 3, 6) + tet(0, 3, 7, 6) + tet(0, 7, 4, 6) +
         tet(0, 4, 5, 6) + tet(0, 5, 1, 6);
}

inline std::array<Vec3, 8> hex_corners(const VolumeMesh& m, const std::array<int, 8>& e) {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i) c[i] = m.nodes[e[i]];
  return c;
}

inline double element_volume(const VolumeMesh& m, int index) {
  int nh = static_cast<int>(m.hex_elements.size());
  if (index < nh) return hex_volume(hex_corners(m, m.hex_elements[index]));
  const auto& t = m.tet_elements[index - nh];
  return tet_signed_volume(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]], m.nodes[t[3]]);
}

namespace detail {

// Trilinear shape function derivatives at a reference corner; used for the
// corner-Jacobian positivity check.
inline double hex_corner_jacobian(const std::array<Vec3, 8>& c, int corner) {
  static const int sign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                 {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  double J[3][3] = {};
  for (int a = 0; a < 8; ++a) {
    double dxi = 0.125 * sign[a][0] * (1 + sign[a][1] * sign[corner][1]) * (1 + sign[a][2] * sign[corner][2]);
    double deta = 0.125 * sign[a][1] * (1 + sign[a][0] * sign[corner][0]) * (1 + sign[a][2] * sign[corner][2]);
    double dzeta = 0.125 * sign[a][2] * (1 + sign[a][0] * sign[corner][0]) * (1 + sign[a][1] * sign[corner][1]);
    for (int d = 0; d < 3; ++d) {
      J[d][0] += c[a][d] * dxi;
      J[d][1] += c[a][d] * deta;
      J[d][2] += c[a][d] * dzeta;
    }
  }
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
         J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

}  // namespace detail

inline void VolumeMesh::validate() const {
  if (nodes.empty() || (hex_elements.empty() && tet_elements.empty()))
    throw MeshError("empty volume mesh");
  int n = node_count();
  for (size_t i = 0; i < hex_elements.size(); ++i) {
    for (int k : hex_elements[i])
      if (k < 0 || k >= n) throw MeshError("hex " + std::to_string(i) + " node index out of range");
    auto c = hex_corners(*this, hex_elements[i]);
    for (int corner = 0; corner < 8; ++corner)
      if (detail::hex_corner_jacobian(c, corner) <= 0.0)
        throw MeshError("hex " + std::to_string(i) + " has non-positive corner Jacobian");
  }
  for (size_t i = 0; i < tet_elements.size(); ++i) {
    const auto& t = tet_elements[i];
    for (int k : t)
      if (k < 0 || k >= n) throw MeshError("tet " + std::to_string(i) + " node index out of range");
    if (tet_signed_volume(nodes[t[0]], nodes[t[1]], nodes[t[2]], nodes[t[3]]) <= 0.0)
      throw MeshError("tet " + std::to_string(i) + " has non-positive volume");
  }
  for (const auto& [name, ids] : node_sets)
    for (int k : ids)
      if (k < 0 || k >= n) throw MeshError("node set '" + name + "' index out of range");
  int ne = element_count();
  for (const auto& [name, ids] : element_sets)
    for (int k : ids)
      if (k < 0 || k >= ne) throw MeshError("element set '" + name + "' index out of range");
}

// Splits each quad along its shorter 3D diagonal; triangles pass through unchanged.
inline TriangleMesh triangulate(const QuadDominantMesh& q) {
  q.validate();
  TriangleMesh out;
  out.vertices = q.vertices;
  out.faces.reserve(q.triangles.size() + 2 * q.quads.size());
  for (const auto& quad : q.quads) {
    const Vec3 &a = q.vertices[quad[0]], &b = q.vertices[quad[1]];
    const Vec3 &c = q.vertices[quad[2]], &d = q.vertices[quad[3]];
    if (norm2(c - a) <= norm2(d - b)) {
      out.faces.push_back({quad[0], quad[1], quad[2]});
      out.faces.push_back({quad[0], quad[2], quad[3]});
    } else {
      out.faces.push_back({quad[1], quad[2], quad[3]});
      out.faces.push_back({quad[1], quad[3], quad[0]});
    }
  }
  for (const auto& t : q.triangles) out.faces.push_back(t);
  return out;
}

namespace detail {
inline uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}
}  // namespace detail

// Makes face winding consistent within each connected component, then flips whole
// components so the majority of their original windings wins. Reconstruction tools
// do not guarantee orientation, so this runs at ingestion.
inline void normalize_winding(TriangleMesh& mesh) {
  int nf = mesh.face_count();
  if (nf == 0) return;

  // edge -> adjacent faces (manifold edges see at most 2)
  std::unordered_map<uint64_t, std::array<int, 2>> edge_faces;
  edge_faces.reserve(nf * 3);
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      uint64_t key = detail::edge_key(mesh.faces[f][k], mesh.faces[f][(k + 1) % 3]);
      auto [it, fresh] = edge_faces.try_emplace(key, std::array<int, 2>{f, -1});
      if (!fresh && it->second[1] == -1 && it->second[0] != f) it->second[1] = f;
    }
  }

  std::vector<int8_t> state(nf, 0);  // 0 unvisited, 1 keep, -1 flipped
  std::vector<int> stack;
  for (int seed = 0; seed < nf; ++seed) {
    if (state[seed] != 0) continue;
    std::vector<int> component;
    state[seed] = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      component.push_back(f);
      auto face = mesh.faces[f];
      if (state[f] == -1) std::swap(face[1], face[2]);  // orientation as decided
      for (int k = 0; k < 3; ++k) {
        int a = face[k], b = face[(k + 1) % 3];
        auto it = edge_faces.find(detail::edge_key(a, b));
        if (it == edge_faces.end()) continue;
        for (int g : it->second) {
          if (g < 0 || g == f || state[g] != 0) continue;
          // The edge (a,b) is already in decided orientation, so the neighbor's
          // stored winding is consistent iff it traverses the shared edge as (b,a).
          bool consistent = false;
          const auto& gf = mesh.faces[g];
          for (int m = 0; m < 3; ++m)
            if (gf[m] == b && gf[(m + 1) % 3] == a) consistent = true;
          state[g] = consistent ? 1 : -1;
          stack.push_back(g);
        }
      }
    }
    int flipped = 0;
    for (int f : component) flipped += state[f] == -1 ? 1 : 0;
    bool invert = flipped * 2 > static_cast<int>(component.size());
    for (int f : component) {
      bool flip = (state[f] == -1) != invert;
      if (flip) std::swap(mesh.faces[f][1], mesh.faces[f][2]);
    }
  }
}

// Exterior faces of a volume mesh: faces used by exactly one element, with
// outward corner order. verts[3] = -1 marks triangular (tet) faces.
inline std::vector<std::array<int, 4>> extract_boundary_faces(const VolumeMesh& m) {
  static const int hex_faces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                      {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  static const int tet_faces[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};

  struct FaceRec {
    std::array<int, 4> verts;
    int count = 0;
  };
  std::map<std::array<int, 4>, FaceRec> uses;  // key: sorted vertex ids

  auto add = [&](std::array<int, 4> v) {
    std::array<int, 4> key = v;
    std::sort(key.begin(), key.end());
    auto [it, fresh] = uses.try_emplace(key);
    if (fresh) it->second.verts = v;
    it->second.count++;
  };

  for (const auto& h : m.hex_elements)
    for (const auto& f : hex_faces) add({h[f[0]], h[f[1]], h[f[2]], h[f[3]]});
  for (const auto& t : m.tet_elements)
    for (const auto& f : tet_faces) add({t[f[0]], t[f[1]], t[f[2]], -1});

  std::vector<std::array<int, 4>> out;
  for (const auto& [key, rec] : uses)
    if (rec.count == 1) out.push_back(rec.verts);
  return out;
}

// Triangulated exterior shell. Node positions are shared with the volume mesh so
// nodal fields carry over directly.
inline TriangleMesh extract_boundary_surface(const VolumeMesh& m) {
  TriangleMesh out;
  out.vertices = m.nodes;
  for (const auto& v : extract_boundary_faces(m)) {
    if (v[3] < 0) {
      out.faces.push_back({v[0], v[1], v[2]});
    } else {
      out.faces.push_back({v[0], v[1], v[2]});
      out.faces.push_back({v[0], v[2], v[3]});
    }
  }
  return out;
}

}  // namespace scan2sim
