#pragma once

#include <cstring>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/io/format.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

namespace detail {

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

inline PlyType ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::I8;
  if (s == "uchar" || s == "uint8") return PlyType::U8;
  if (s == "short" || s == "int16") return PlyType::I16;
  if (s == "ushort" || s == "uint16") return PlyType::U16;
  if (s == "int" || s == "int32") return PlyType::I32;
  if (s == "uint" || s == "uint32") return PlyType::U32;
  if (s == "float" || s == "float32") return PlyType::F32;
  if (s == "double" || s == "float64") return PlyType::F64;
  throw IoError("PLY: unknown type '" + s + "'");
}

inline size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::I8:
    case PlyType::U8: return 1;
    case PlyType::I16:
    case PlyType::U16: return 2;
    case PlyType::I32:
    case PlyType::U32:
    case PlyType::F32: return 4;
    case PlyType::F64: return 8;
  }
  return 0;
}

inline double read_binary_scalar(std::istream& in, PlyType t) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_size(t)));
  if (!in) throw IoError("PLY: unexpected end of binary data");
  auto le = [&](int n) {
    uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  };
  switch (t) {
    case PlyType::I8: return static_cast<int8_t>(buf[0]);
    case PlyType::U8: return buf[0];
    case PlyType::I16: return static_cast<int16_t>(le(2));
    case PlyType::U16: return static_cast<uint16_t>(le(2));
    case PlyType::I32: return static_cast<int32_t>(le(4));
    case PlyType::U32: return static_cast<uint32_t>(le(4));
    case PlyType::F32: {
      uint32_t bits = static_cast<uint32_t>(le(4));
      float f;
      std::memcpy(&f, &bits, 4);
      return f;
    }
    case PlyType::F64: {
      uint64_t bits = le(8);
      double d;
      std::memcpy(&d, &bits, 8);
      return d;
    }
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::F32;
  bool is_list = false;
  PlyType count_type = PlyType::U8;
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> properties;
};

}  // namespace detail

// PLY reader for ASCII and binary_little_endian files. Vertex x/y/z and the face
// index list are extracted; any other properties are parsed and skipped.
inline TriangleMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw IoError("PLY: missing magic");

  bool binary = false;
  std::vector<detail::PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw IoError("PLY: unsupported format '" + fmt + "'");
    } else if (tag == "element") {
      detail::PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw IoError("PLY: property before element");
      std::string t;
      ls >> t;
      detail::PlyProperty p;
      if (t == "list") {
        std::string ct, vt;
        ls >> ct >> vt >> p.name;
        p.is_list = true;
        p.count_type = detail::ply_type(ct);
        p.type = detail::ply_type(vt);
      } else {
        p.type = detail::ply_type(t);
        ls >> p.name;
      }
      elements.back().properties.push_back(p);
    } else if (tag == "end_header") {
      break;
    } else if (!tag.empty()) {
      throw IoError("PLY: unexpected header line '" + line + "'");
    }
  }

  TriangleMesh mesh;
  auto next_ascii = [&]() {
    double v;
    if (!(in >> v)) throw IoError("PLY: unexpected end of ASCII data");
    return v;
  };

  for (const auto& elem : elements) {
    bool is_vertex = elem.name == "vertex";
    bool is_face = elem.name == "face";
    int xi = -1, yi = -1, zi = -1, li = -1;
    for (size_t p = 0; p < elem.properties.size(); ++p) {
      const auto& prop = elem.properties[p];
      if (prop.name == "x") xi = static_cast<int>(p);
      if (prop.name == "y") yi = static_cast<int>(p);
      if (prop.name == "z") zi = static_cast<int>(p);
      if (prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index"))
        li = static_cast<int>(p);
    }
    if (is_vertex && (xi < 0 || yi < 0 || zi < 0)) throw IoError("PLY: vertex element lacks x/y/z");
    if (is_face && li < 0) throw IoError("PLY: face element lacks vertex_indices");

    for (size_t r = 0; r < elem.count; ++r) {
      Vec3 pos;
      std::vector<long> poly;
      for (size_t p = 0; p < elem.properties.size(); ++p) {
        const auto& prop = elem.properties[p];
        if (prop.is_list) {
          double cnt = binary ? detail::read_binary_scalar(in, prop.count_type) : next_ascii();
          long n = static_cast<long>(cnt);
          if (n < 0 || n > 1024) throw IoError("PLY: implausible list count");
          for (long k = 0; k < n; ++k) {
            double v = binary ? detail::read_binary_scalar(in, prop.type) : next_ascii();
            if (static_cast<int>(p) == li) poly.push_back(static_cast<long>(v));
          }
        } else {
          double v = binary ? detail::read_binary_scalar(in, prop.type) : next_ascii();
          if (static_cast<int>(p) == xi) pos.x = v;
          if (static_cast<int>(p) == yi) pos.y = v;
          if (static_cast<int>(p) == zi) pos.z = v;
        }
      }
      if (is_vertex) mesh.vertices.push_back(pos);
      if (is_face) {
        if (poly.size() < 3) throw IoError("PLY: face with <3 vertices");
        for (size_t k = 1; k + 1 < poly.size(); ++k) {
          std::array<long, 3> ids{poly[0], poly[k], poly[k + 1]};
          std::array<int, 3> tri;
          for (int m = 0; m < 3; ++m) {
            if (ids[m] < 0 || ids[m] >= static_cast<long>(mesh.vertices.size()))
              throw IoError("PLY: face index " + std::to_string(ids[m]) + " out of range");
            tri[m] = static_cast<int>(ids[m]);
          }
          if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
          mesh.faces.push_back(tri);
        }
      }
    }
  }
  if (mesh.vertices.empty() || mesh.faces.empty()) throw IoError("PLY: empty mesh");
  return mesh;
}

inline void write_ply(std::ostream& out, const TriangleMesh& mesh) {
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertices.size() << '\n';
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << mesh.faces.size() << '\n';
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  for (const auto& v : mesh.vertices)
    out << detail::fmt_g9(v.x) << ' ' << detail::fmt_g9(v.y) << ' ' << detail::fmt_g9(v.z) << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace scan2sim::io
