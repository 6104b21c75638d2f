#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "scan2sim/io/gltf.hpp"
#include "scan2sim/io/inp.hpp"
#include "scan2sim/io/obj.hpp"
#include "scan2sim/io/ply.hpp"
#include "scan2sim/io/vtk.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

enum class SurfaceFormat { Obj, Ply };

inline SurfaceFormat format_from_path(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return SurfaceFormat::Obj;
  if (ext == ".ply") return SurfaceFormat::Ply;
  throw IoError("unrecognized surface format for '" + path + "' (expected .obj or .ply)");
}

// Loads a reconstruction surface, normalizes face winding per connected component,
// and checks the mesh invariants.
inline TriangleMesh load_surface(const std::string& path, SurfaceFormat format,
                                 std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  TriangleMesh mesh = format == SurfaceFormat::Obj ? read_obj(in, warnings) : read_ply(in);
  mesh.validate();
  normalize_winding(mesh);
  return mesh;
}

inline TriangleMesh load_surface(const std::string& path,
                                 std::vector<std::string>* warnings = nullptr) {
  return load_surface(path, format_from_path(path), warnings);
}

template <typename WriteFn>
inline void write_file(const std::string& path, WriteFn&& fn, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

inline void save_surface(const std::string& path, const TriangleMesh& mesh) {
  switch (format_from_path(path)) {
    case SurfaceFormat::Obj:
      write_file(path, [&](std::ostream& o) { write_obj(o, mesh); });
      break;
    case SurfaceFormat::Ply:
      write_file(path, [&](std::ostream& o) { write_ply(o, mesh); });
      break;
  }
}

}  // namespace scan2sim::io
