#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/io/format.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

namespace detail {

inline int resolve_obj_index(long idx, size_t count, const std::string& what) {
  long resolved = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;  // negative = relative
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(count))
    throw IoError("OBJ " + what + " index " + std::to_string(idx) + " out of range");
  return static_cast<int>(resolved);
}

}  // namespace detail

// Wavefront OBJ reader: v / vn / f records, 1-based or negative relative indices,
// polygons fan-triangulated. Degenerate fan triangles are dropped.
inline TriangleMesh read_obj(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  TriangleMesh mesh;
  std::vector<Vec3> normals;
  std::vector<int> normal_of_vertex;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw IoError("OBJ line " + std::to_string(lineno) + ": malformed vertex");
      mesh.vertices.push_back(p);
    } else if (tag == "vn") {
      Vec3 n;
      if (!(ls >> n.x >> n.y >> n.z)) throw IoError("OBJ line " + std::to_string(lineno) + ": malformed normal");
      normals.push_back(n);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string corner;
      while (ls >> corner) {
        // forms: i, i/t, i//n, i/t/n
        size_t slash = corner.find('/');
        long vi = std::stol(corner.substr(0, slash));
        poly.push_back(detail::resolve_obj_index(vi, mesh.vertices.size(), "vertex"));
        size_t second = slash == std::string::npos ? std::string::npos : corner.find('/', slash + 1);
        if (second != std::string::npos && second + 1 < corner.size()) {
          long ni = std::stol(corner.substr(second + 1));
          int resolved = detail::resolve_obj_index(ni, normals.size(), "normal");
          normal_of_vertex.resize(std::max(normal_of_vertex.size(), mesh.vertices.size()), -1);
          normal_of_vertex[poly.back()] = resolved;
        }
      }
      if (poly.size() < 3) throw IoError("OBJ line " + std::to_string(lineno) + ": face with <3 vertices");
      for (size_t k = 1; k + 1 < poly.size(); ++k) {
        int a = poly[0], b = poly[k], c = poly[k + 1];
        if (a == b || b == c || a == c) {
          if (warnings)
            warnings->push_back("OBJ line " + std::to_string(lineno) + ": dropped degenerate fan triangle");
          continue;
        }
        mesh.faces.push_back({a, b, c});
      }
    }
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) throw IoError("OBJ: empty mesh");
  if (!normals.empty() && normal_of_vertex.size() == mesh.vertices.size()) {
    bool complete = true;
    for (int n : normal_of_vertex) complete = complete && n >= 0;
    if (complete) {
      mesh.normals.resize(mesh.vertices.size());
      for (size_t i = 0; i < mesh.vertices.size(); ++i)
        mesh.normals[i] = normalized(normals[normal_of_vertex[i]]);
    }
  }
  return mesh;
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  for (const auto& v : mesh.vertices)
    out << "v " << detail::fmt_g9(v.x) << ' ' << detail::fmt_g9(v.y) << ' ' << detail::fmt_g9(v.z)
        << '\n';
  for (const auto& n : mesh.normals)
    out << "vn " << detail::fmt_g9(n.x) << ' ' << detail::fmt_g9(n.y) << ' '
        << detail::fmt_g9(n.z) << '\n';
  bool with_normals = !mesh.normals.empty();
  for (const auto& f : mesh.faces) {
    out << 'f';
    for (int v : f) {
      out << ' ' << v + 1;
      if (with_normals) out << "//" << v + 1;
    }
    out << '\n';
  }
}

// Quad-dominant meshes keep their quads as 4-corner OBJ faces.
inline void write_obj(std::ostream& out, const QuadDominantMesh& mesh) {
  for (const auto& v : mesh.vertices)
    out << "v " << detail::fmt_g9(v.x) << ' ' << detail::fmt_g9(v.y) << ' ' << detail::fmt_g9(v.z)
        << '\n';
  for (const auto& q : mesh.quads)
    out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

}  // namespace scan2sim::io
