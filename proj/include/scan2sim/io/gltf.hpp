#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2sim/core.hpp"
#include "scan2sim/io/colormap.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

// Binary glTF 2.0 (GLB) with POSITION + COLOR_0 vertex attributes: the portable
// stand-in for the AR overlay stage, openable in any standard glTF viewer.
inline void write_gltf_colored(std::ostream& out, const TriangleMesh& mesh,
                               const ScalarField& field, const Colormap& colormap) {
  mesh.validate();
  if (field.association != FieldAssociation::PerNode)
    throw IoError("glTF export requires a per-node field");
  if (field.values.size() != mesh.vertices.size())
    throw IoError("glTF export: field length does not match vertex count");

  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double range = hi - lo;

  size_t nv = mesh.vertices.size(), nf = mesh.faces.size();
  std::vector<unsigned char> bin;
  bin.reserve(nv * 24 + nf * 12);
  auto put_f32 = [&](float f) {
    unsigned char b[4];
    std::memcpy(b, &f, 4);
    bin.insert(bin.end(), b, b + 4);
  };
  auto put_u32 = [&](uint32_t u) {
    unsigned char b[4];
    std::memcpy(b, &u, 4);
    bin.insert(bin.end(), b, b + 4);
  };

  float pmin[3] = {std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
                   std::numeric_limits<float>::max()};
  float pmax[3] = {std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
                   std::numeric_limits<float>::lowest()};
  for (const auto& v : mesh.vertices)
    for (int d = 0; d < 3; ++d) {
      float f = static_cast<float>(v[d]);
      pmin[d] = std::min(pmin[d], f);
      pmax[d] = std::max(pmax[d], f);
      put_f32(f);
    }
  size_t color_offset = bin.size();
  for (double v : field.values) {
    double t = range > 0.0 ? (v - lo) / range : 0.5;
    auto c = colormap.sample(t);
    put_f32(c[0]);
    put_f32(c[1]);
    put_f32(c[2]);
  }
  size_t index_offset = bin.size();
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) put_u32(static_cast<uint32_t>(f[k]));
  while (bin.size() % 4 != 0) bin.push_back(0);

  nlohmann::json j;
  j["asset"] = {{"version", "2.0"}, {"generator", "scan2sim"}};
  j["scene"] = 0;
  j["scenes"] = {{{"nodes", {0}}}};
  j["nodes"] = {{{"mesh", 0}}};
  j["meshes"] = {{{"primitives",
                   {{{"attributes", {{"POSITION", 0}, {"COLOR_0", 1}}},
                     {"indices", 2},
                     {"mode", 4}}}}}};
  j["buffers"] = {{{"byteLength", bin.size()}}};
  j["bufferViews"] = {
      {{"buffer", 0}, {"byteOffset", 0}, {"byteLength", color_offset}, {"target", 34962}},
      {{"buffer", 0},
       {"byteOffset", color_offset},
       {"byteLength", index_offset - color_offset},
       {"target", 34962}},
      {{"buffer", 0},
       {"byteOffset", index_offset},
       {"byteLength", nf * 12},
       {"target", 34963}}};
  j["accessors"] = {{{"bufferView", 0},
                     {"componentType", 5126},
                     {"count", nv},
                     {"type", "VEC3"},
                     {"min", {pmin[0], pmin[1], pmin[2]}},
                     {"max", {pmax[0], pmax[1], pmax[2]}}},
                    {{"bufferView", 1}, {"componentType", 5126}, {"count", nv}, {"type", "VEC3"}},
                    {{"bufferView", 2},
                     {"componentType", 5125},
                     {"count", nf * 3},
                     {"type", "SCALAR"}}};

  std::string json_text = j.dump();
  while (json_text.size() % 4 != 0) json_text.push_back(' ');

  uint32_t total = 12 + 8 + static_cast<uint32_t>(json_text.size()) + 8 +
                   static_cast<uint32_t>(bin.size());
  auto emit_u32 = [&](uint32_t u) { out.write(reinterpret_cast<const char*>(&u), 4); };
  emit_u32(0x46546C67);  // "glTF"
  emit_u32(2);
  emit_u32(total);
  emit_u32(static_cast<uint32_t>(json_text.size()));
  emit_u32(0x4E4F534A);  // "JSON"
  out.write(json_text.data(), static_cast<std::streamsize>(json_text.size()));
  emit_u32(static_cast<uint32_t>(bin.size()));
  emit_u32(0x004E4942);  // "BIN"
  out.write(reinterpret_cast<const char*>(bin.data()), static_cast<std::streamsize>(bin.size()));
  if (!out) throw IoError("glTF: write failure");
}

}  // namespace scan2sim::io
