#pragma once

// Structural glTF 2.0 binary validator used in place of an online validator so
// the suite stays hermetic: container layout, chunk alignment, JSON required
// fields, accessor/bufferView bounds, POSITION min/max correctness.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace oracle {

struct GlbReport {
  nlohmann::json json;
  std::vector<unsigned char> bin;
};

inline GlbReport validate_glb(const std::string& bytes) {
  auto fail = [](const std::string& msg) { throw std::runtime_error("glb: " + msg); };
  auto u32 = [&](size_t off) {
    uint32_t v;
    std::memcpy(&v, bytes.data() + off, 4);
    return v;
  };
  if (bytes.size() < 20) fail("too short");
  if (u32(0) != 0x46546C67) fail("bad magic");
  if (u32(4) != 2) fail("unsupported container version");
  if (u32(8) != bytes.size()) fail("declared length != file size");

  size_t off = 12;
  GlbReport rep;
  bool saw_json = false, saw_bin = false;
  while (off + 8 <= bytes.size()) {
    uint32_t len = u32(off), type = u32(off + 4);
    if (len % 4 != 0) fail("chunk length not 4-aligned");
    if (off + 8 + len > bytes.size()) fail("chunk overruns file");
    if (type == 0x4E4F534A) {
      if (saw_json) fail("duplicate JSON chunk");
      saw_json = true;
      rep.json = nlohmann::json::parse(bytes.substr(off + 8, len));
    } else if (type == 0x004E4942) {
      if (!saw_json) fail("BIN chunk before JSON chunk");
      saw_bin = true;
      rep.bin.assign(bytes.begin() + static_cast<long>(off) + 8,
                     bytes.begin() + static_cast<long>(off) + 8 + len);
    }
    off += 8 + len;
  }
  if (off != bytes.size()) fail("trailing bytes after last chunk");
  if (!saw_json) fail("missing JSON chunk");

  const auto& j = rep.json;
  if (!j.contains("asset") || j["asset"].value("version", "") != "2.0")
    fail("asset.version must be 2.0");
  if (!j.contains("meshes") || !j.contains("accessors") || !j.contains("bufferViews"))
    fail("missing top-level arrays");
  size_t buffer_len = j["buffers"].at(0).at("byteLength").get<size_t>();
  if (saw_bin && rep.bin.size() < buffer_len) fail("BIN chunk smaller than declared buffer");

  for (const auto& bv : j["bufferViews"]) {
    size_t bo = bv.value("byteOffset", size_t{0});
    size_t bl = bv.at("byteLength").get<size_t>();
    if (bo + bl > buffer_len) fail("bufferView out of buffer bounds");
  }

  auto comp_size = [&](int ct) {
    switch (ct) {
      case 5120: case 5121: return 1;
      case 5122: case 5123: return 2;
      case 5125: case 5126: return 4;
      default: fail("unknown componentType"); return 0;
    }
  };
  auto type_count = [&](const std::string& t) {
    if (t == "SCALAR") return 1;
    if (t == "VEC2") return 2;
    if (t == "VEC3") return 3;
    if (t == "VEC4") return 4;
    fail("unknown accessor type");
    return 0;
  };
  for (const auto& acc : j["accessors"]) {
    const auto& bv = j["bufferViews"].at(acc.at("bufferView").get<size_t>());
    size_t need = acc.at("count").get<size_t>() *
                  static_cast<size_t>(comp_size(acc.at("componentType").get<int>())) *
                  static_cast<size_t>(type_count(acc.at("type").get<std::string>()));
    if (need > bv.at("byteLength").get<size_t>()) fail("accessor overruns its bufferView");
  }

  // POSITION accessor must carry correct min/max
  const auto& prim = j["meshes"].at(0).at("primitives").at(0);
  size_t pos_idx = prim.at("attributes").at("POSITION").get<size_t>();
  const auto& pos = j["accessors"].at(pos_idx);
  if (!pos.contains("min") || !pos.contains("max")) fail("POSITION accessor lacks min/max");
  const auto& bv = j["bufferViews"].at(pos.at("bufferView").get<size_t>());
  size_t base = bv.value("byteOffset", size_t{0});
  size_t count = pos.at("count").get<size_t>();
  float mn[3] = {INFINITY, INFINITY, INFINITY}, mx[3] = {-INFINITY, -INFINITY, -INFINITY};
  for (size_t i = 0; i < count; ++i)
    for (int d = 0; d < 3; ++d) {
      float f;
      std::memcpy(&f, rep.bin.data() + base + (i * 3 + d) * 4, 4);
      mn[d] = std::min(mn[d], f);
      mx[d] = std::max(mx[d], f);
    }
  for (int d = 0; d < 3; ++d) {
    if (pos.at("min").at(d).get<double>() != static_cast<double>(mn[d])) fail("POSITION min wrong");
    if (pos.at("max").at(d).get<double>() != static_cast<double>(mx[d])) fail("POSITION max wrong");
  }

  // indices in range
  if (prim.contains("indices")) {
    const auto& iacc = j["accessors"].at(prim.at("indices").get<size_t>());
    if (iacc.at("componentType").get<int>() != 5125) fail("expected u32 indices");
    const auto& ibv = j["bufferViews"].at(iacc.at("bufferView").get<size_t>());
    size_t ibase = ibv.value("byteOffset", size_t{0});
    for (size_t i = 0; i < iacc.at("count").get<size_t>(); ++i) {
      uint32_t v;
      std::memcpy(&v, rep.bin.data() + ibase + i * 4, 4);
      if (v >= count) fail("index out of vertex range");
    }
  }
  return rep;
}

}  // namespace oracle
