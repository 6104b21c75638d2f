#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scan2sim/core.hpp"
#include "scan2sim/fea/model.hpp"
#include "scan2sim/io/format.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::io {

namespace detail {

// Abaqus-style number: integral values keep a trailing dot ("10000."), everything
// else uses plain shortest-form decimals.
inline std::string fmt_abaqus(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.0f.", v);
    return buf;
  }
  return fmt_g9(v);
}

inline void write_id_lines(std::ostream& out, const std::vector<int>& ids, int base) {
  // at most 16 entries per data line
  for (size_t i = 0; i < ids.size(); ++i) {
    out << ids[i] + base;
    bool line_end = (i % 16 == 15) || i + 1 == ids.size();
    out << (line_end ? "\n" : ", ");
  }
}

}  // namespace detail

// Solver-input deck: nodes, elements, sets, material, boundary conditions and
// loads, complete enough to re-run the case in an external solver. Node and
// element ids are 1-based in the deck.
inline void write_inp(std::ostream& out, const VolumeMesh& mesh, const fea::Material& material,
                      const fea::LoadCase& load, const std::string& heading = "scan2sim model") {
  mesh.validate();
  material.validate();
  load.validate(mesh);

  out << "*HEADING\n" << heading << "\n";
  out << "*NODE\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec3& p = mesh.nodes[i];
    out << i + 1 << ", " << detail::fmt_g9(p.x) << ", " << detail::fmt_g9(p.y) << ", "
        << detail::fmt_g9(p.z) << "\n";
  }
  int eid = 1;
  if (!mesh.hex_elements.empty()) {
    out << "*ELEMENT, TYPE=C3D8, ELSET=HEXES\n";
    for (const auto& h : mesh.hex_elements) {
      out << eid++;
      for (int n : h) out << ", " << n + 1;
      out << "\n";
    }
  }
  if (!mesh.tet_elements.empty()) {
    out << "*ELEMENT, TYPE=C3D4, ELSET=TETS\n";
    for (const auto& t : mesh.tet_elements) {
      out << eid++;
      for (int n : t) out << ", " << n + 1;
      out << "\n";
    }
  }
  out << "*ELSET, ELSET=ALL, GENERATE\n1, " << mesh.element_count() << ", 1\n";
  for (const auto& [name, ids] : mesh.node_sets) {
    out << "*NSET, NSET=" << name << "\n";
    detail::write_id_lines(out, ids, 1);
  }
  for (const auto& [name, ids] : mesh.element_sets) {
    out << "*ELSET, ELSET=" << name << "\n";
    detail::write_id_lines(out, ids, 1);
  }
  out << "*MATERIAL, NAME=MAT\n";
  out << "*ELASTIC\n";
  out << detail::fmt_abaqus(material.young_modulus_mpa) << ", "
      << detail::fmt_g9(material.poisson_ratio) << "\n";
  out << "*DENSITY\n";
  out << detail::fmt_g9(material.density_consistent()) << ",\n";
  out << "*SOLID SECTION, ELSET=ALL, MATERIAL=MAT\n";
  out << "*STEP\n*STATIC\n";
  for (const auto& c : load.constraints) {
    out << "*BOUNDARY\n";
    if (c.fixed_dof[0] && c.fixed_dof[1] && c.fixed_dof[2]) {
      out << c.node_set << ", 1, 3\n";
    } else {
      for (int d = 0; d < 3; ++d)
        if (c.fixed_dof[d]) out << c.node_set << ", " << d + 1 << ", " << d + 1 << "\n";
    }
  }
  double g = norm(load.gravity_mm_s2);
  if (g > 0.0) {
    Vec3 dir = load.gravity_mm_s2 / g;
    out << "*DLOAD\n";
    out << "ALL, GRAV, " << detail::fmt_g9(g) << ", " << detail::fmt_g9(dir.x) << ", "
        << detail::fmt_g9(dir.y) << ", " << detail::fmt_g9(dir.z) << "\n";
  }
  for (const auto& l : load.surface_loads) {
    const auto& ids = mesh.node_sets.at(l.node_set);
    // The deck carries the equal-per-node split so any solver reproduces the load.
    Vec3 per = l.total_force_n / static_cast<double>(ids.size());
    out << "*CLOAD\n";
    for (int d = 0; d < 3; ++d)
      if (per[d] != 0.0)
        out << l.node_set << ", " << d + 1 << ", " << detail::fmt_g9(per[d]) << "\n";
  }
  out << "*END STEP\n";
}

// Deck reader covering the keywords this library writes plus the common variants
// needed to import externally produced hex/tet meshes (including NSET/ELSET with
// GENERATE). Loads and materials are not reconstructed, only geometry and sets.
inline VolumeMesh read_inp(std::istream& in) {
  VolumeMesh mesh;
  std::map<int, int> node_id_map;  // deck id -> index
  std::vector<int> element_order;  // deck order: 0 = hex slot, 1 = tet slot
  std::map<int, int> element_id_map;

  auto upper = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
  };
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  auto split_csv = [&](const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
  };
  auto keyword_param = [&](const std::vector<std::string>& parts, const std::string& key) {
    for (const auto& p : parts) {
      auto eq = p.find('=');
      if (eq != std::string::npos && upper(trim(p.substr(0, eq))) == key)
        return trim(p.substr(eq + 1));
    }
    return std::string{};
  };
  auto has_param = [&](const std::vector<std::string>& parts, const std::string& key) {
    for (const auto& p : parts)
      if (upper(trim(p)) == key) return true;
    return false;
  };

  enum class Section { None, Node, HexElement, TetElement, Nset, Elset };
  Section section = Section::None;
  std::string set_name;
  bool generate = false;
  // deck ids per set, resolved once the whole deck is read
  std::map<std::string, std::vector<int>> pending_nsets, pending_elsets;

  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    if (line.empty() || line.rfind("**", 0) == 0) continue;
    if (line[0] == '*') {
      auto parts = split_csv(line);
      std::string kw = upper(parts[0]);
      section = Section::None;
      if (kw == "*NODE") {
        section = Section::Node;
      } else if (kw == "*ELEMENT") {
        std::string type = upper(keyword_param(parts, "TYPE"));
        if (type.rfind("C3D8", 0) == 0) section = Section::HexElement;
        else if (type.rfind("C3D4", 0) == 0) section = Section::TetElement;
        else throw IoError("INP: unsupported element type '" + type + "'");
      } else if (kw == "*NSET" || kw == "*ELSET") {
        section = kw == "*NSET" ? Section::Nset : Section::Elset;
        set_name = keyword_param(parts, kw == "*NSET" ? "NSET" : "ELSET");
        if (set_name.empty()) throw IoError("INP: set keyword without a name");
        generate = has_param(parts, "GENERATE");
      }
      continue;  // all other keywords are skipped, their data lines fall to None
    }
    auto parts = split_csv(line);
    switch (section) {
      case Section::Node: {
        if (parts.size() < 4) throw IoError("INP: malformed node line '" + line + "'");
        int id = std::stoi(parts[0]);
        node_id_map[id] = mesh.node_count();
        mesh.nodes.push_back({std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])});
        break;
      }
      case Section::HexElement:
      case Section::TetElement: {
        size_t want = section == Section::HexElement ? 9 : 5;
        if (parts.size() < want) throw IoError("INP: malformed element line '" + line + "'");
        int id = std::stoi(parts[0]);
        if (section == Section::HexElement) {
          std::array<int, 8> e;
          for (int k = 0; k < 8; ++k) {
            auto it = node_id_map.find(std::stoi(parts[k + 1]));
            if (it == node_id_map.end()) throw IoError("INP: element references unknown node");
            e[k] = it->second;
          }
          element_id_map[id] = static_cast<int>(element_order.size());
          element_order.push_back(static_cast<int>(mesh.hex_elements.size()) << 1);
          mesh.hex_elements.push_back(e);
        } else {
          std::array<int, 4> e;
          for (int k = 0; k < 4; ++k) {
            auto it = node_id_map.find(std::stoi(parts[k + 1]));
            if (it == node_id_map.end()) throw IoError("INP: element references unknown node");
            e[k] = it->second;
          }
          element_id_map[id] = static_cast<int>(element_order.size());
          element_order.push_back((static_cast<int>(mesh.tet_elements.size()) << 1) | 1);
          mesh.tet_elements.push_back(e);
        }
        break;
      }
      case Section::Nset:
      case Section::Elset: {
        std::vector<int> ids;
        if (generate) {
          if (parts.size() < 2) throw IoError("INP: malformed GENERATE line");
          int first = std::stoi(parts[0]), last = std::stoi(parts[1]);
          int step = parts.size() > 2 && !parts[2].empty() ? std::stoi(parts[2]) : 1;
          for (int v = first; v <= last; v += step) ids.push_back(v);
        } else {
          for (const auto& p : parts)
            if (!p.empty()) ids.push_back(std::stoi(p));
        }
        auto& target = section == Section::Nset ? pending_nsets[set_name] : pending_elsets[set_name];
        target.insert(target.end(), ids.begin(), ids.end());
        break;
      }
      case Section::None:
        break;
    }
  }
  if (mesh.nodes.empty()) throw IoError("INP: no nodes");

  for (const auto& [name, ids] : pending_nsets) {
    auto& target = mesh.node_sets[name];
    for (int id : ids) {
      auto it = node_id_map.find(id);
      if (it == node_id_map.end())
        throw IoError("INP: NSET references unknown node " + std::to_string(id));
      target.push_back(it->second);
    }
  }
  for (const auto& [name, ids] : pending_elsets) {
    auto& target = mesh.element_sets[name];
    for (int id : ids) {
      auto it = element_id_map.find(id);
      if (it == element_id_map.end())
        throw IoError("INP: ELSET references unknown element " + std::to_string(id));
      // global element index: hexes first, then tets
      int packed = element_order[it->second];
      int idx = packed >> 1;
      target.push_back((packed & 1) ? static_cast<int>(mesh.hex_elements.size()) + idx : idx);
    }
  }
  return mesh;
}

}  // namespace scan2sim::io
