#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::quality {

enum class ElementFamily { Hex, Tet };

struct ElementQuality {
  int element = -1;
  ElementFamily family = ElementFamily::Hex;
  double min_corner_angle_deg = 0.0;
  double max_corner_angle_deg = 0.0;
  double aspect_ratio = 1.0;
  std::optional<double> shape_factor;  // tets only
  bool degenerate = false;
};

struct Thresholds {
  double min_angle_hex_deg = 10.0;
  double min_angle_tet_deg = 5.0;
  double max_angle_deg = 160.0;
  double aspect_ratio = 10.0;
  double shape_factor = 1e-4;
};

// Aggregate rows per element family, mirroring the usual pre-processor report.
struct FamilyStats {
  int total = 0;
  int below_min_angle = 0;
  double average_min_angle = 0.0;
  double worst_min_angle = 0.0;
  int above_max_angle = 0;
  double average_max_angle = 0.0;
  double worst_max_angle = 0.0;
  int aspect_over_limit = 0;
  double average_aspect = 0.0;
  double worst_aspect = 0.0;
  int shape_below_limit = 0;          // tets only
  double average_shape_factor = 0.0;  // tets only
  double worst_shape_factor = 0.0;    // tets only
  int degenerate = 0;
};

struct QualityReport {
  std::vector<ElementQuality> elements;
  FamilyStats hex, tet;
  Thresholds thresholds;
  // pass iff no element violates the max-angle, aspect-ratio, or shape-factor
  // gates; min-angle offenders are reported but do not fail the audit
  bool gate_pass = false;
};

namespace detail {

inline const int (&hex_face_corners())[6][4] {
  static const int faces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                  {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  return faces;
}

inline const int (&hex_edges())[12][2] {
  static const int edges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                   {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  return edges;
}

inline const int (&tet_faces())[4][3] {
  static const int faces[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  return faces;
}

inline const int (&tet_edges())[6][2] {
  static const int edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  return edges;
}

}  // namespace detail

// Face-corner angles in degrees: 24 for a hex (6 quad faces x 4 corners), 12 for
// a tet (4 triangle faces x 3 corners).
inline std::vector<double> corner_angles(const std::array<Vec3, 8>& hex) {
  std::vector<double> angles;
  angles.reserve(24);
  for (const auto& f : detail::hex_face_corners())
    for (int k = 0; k < 4; ++k)
      angles.push_back(
          corner_angle_deg(hex[f[(k + 3) % 4]], hex[f[k]], hex[f[(k + 1) % 4]]));
  return angles;
}

inline std::vector<double> corner_angles(const std::array<Vec3, 4>& tet) {
  std::vector<double> angles;
  angles.reserve(12);
  for (const auto& f : detail::tet_faces())
    for (int k = 0; k < 3; ++k)
      angles.push_back(corner_angle_deg(tet[f[(k + 2) % 3]], tet[f[k]], tet[f[(k + 1) % 3]]));
  return angles;
}

// Longest edge over shortest edge.
template <size_t N>
inline double aspect_ratio_of(const std::array<Vec3, N>& corners) {
  double lo = std::numeric_limits<double>::max(), hi = 0.0;
  auto feed = [&](const Vec3& a, const Vec3& b) {
    double d = norm(a - b);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  };
  if constexpr (N == 8) {
    for (const auto& e : detail::hex_edges()) feed(corners[e[0]], corners[e[1]]);
  } else {
    for (const auto& e : detail::tet_edges()) feed(corners[e[0]], corners[e[1]]);
  }
  if (lo <= 0.0) throw MeshError("degenerate element: zero-length edge");
  return hi / lo;
}

// Circumcenter of the tet (a,b,c,d); throws when the tet is flat.
inline Vec3 tet_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Vec3 u = b - a, v = c - a, w = d - a;
  double det = 2.0 * dot(u, cross(v, w));
  if (det == 0.0) throw MeshError("degenerate element: zero circumradius system");
  Vec3 num = cross(v, w) * norm2(u) + cross(w, u) * norm2(v) + cross(u, v) * norm2(w);
  return a + num / det;
}

// Tet volume normalized by the volume of the equilateral tet inscribed in the
// same circumsphere: 1 for the regular tet, down to 0 for slivers.
inline double shape_factor(const std::array<Vec3, 4>& tet) {
  double vol = std::abs(tet_signed_volume(tet[0], tet[1], tet[2], tet[3]));
  Vec3 center = tet_circumcenter(tet[0], tet[1], tet[2], tet[3]);
  double r = norm(tet[0] - center);
  if (r <= 0.0) throw MeshError("degenerate element: zero circumradius");
  double equilateral = 8.0 * r * r * r / (9.0 * std::sqrt(3.0));
  return std::min(1.0, vol / equilateral);
}

inline ElementQuality measure_hex(const std::array<Vec3, 8>& corners, int id) {
  ElementQuality q;
  q.element = id;
  q.family = ElementFamily::Hex;
  auto angles = corner_angles(corners);
  auto [lo, hi] = std::minmax_element(angles.begin(), angles.end());
  q.min_corner_angle_deg = *lo;
  q.max_corner_angle_deg = *hi;
  q.aspect_ratio = aspect_ratio_of(corners);
  return q;
}

inline ElementQuality measure_tet(const std::array<Vec3, 4>& corners, int id) {
  ElementQuality q;
  q.element = id;
  q.family = ElementFamily::Tet;
  auto angles = corner_angles(corners);
  auto [lo, hi] = std::minmax_element(angles.begin(), angles.end());
  q.min_corner_angle_deg = *lo;
  q.max_corner_angle_deg = *hi;
  q.aspect_ratio = aspect_ratio_of(corners);
  q.shape_factor = shape_factor(corners);
  return q;
}

inline QualityReport audit(const VolumeMesh& mesh, const Thresholds& thresholds = {}) {
  if (mesh.element_count() == 0) throw MeshError("audit on empty mesh");
  QualityReport report;
  report.thresholds = thresholds;
  report.elements.reserve(mesh.element_count());

  int id = 0;
  for (const auto& h : mesh.hex_elements) {
    try {
      report.elements.push_back(measure_hex(hex_corners(mesh, h), id));
    } catch (const MeshError&) {
      ElementQuality q;
      q.element = id;
      q.family = ElementFamily::Hex;
      q.degenerate = true;
      report.elements.push_back(q);
    }
    ++id;
  }
  for (const auto& t : mesh.tet_elements) {
    try {
      std::array<Vec3, 4> corners{mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                  mesh.nodes[t[3]]};
      report.elements.push_back(measure_tet(corners, id));
    } catch (const MeshError&) {
      ElementQuality q;
      q.element = id;
      q.family = ElementFamily::Tet;
      q.degenerate = true;
      report.elements.push_back(q);
    }
    ++id;
  }

  auto reduce = [&](ElementFamily fam, double min_angle_threshold) {
    FamilyStats s;
    double sum_min = 0.0, sum_max = 0.0, sum_aspect = 0.0, sum_shape = 0.0;
    s.worst_min_angle = std::numeric_limits<double>::max();
    s.worst_shape_factor = std::numeric_limits<double>::max();
    int measured = 0, shaped = 0;
    for (const auto& q : report.elements) {
      if (q.family != fam) continue;
      ++s.total;
      if (q.degenerate) {
        ++s.degenerate;
        continue;
      }
      ++measured;
      sum_min += q.min_corner_angle_deg;
      sum_max += q.max_corner_angle_deg;
      sum_aspect += q.aspect_ratio;
      s.worst_min_angle = std::min(s.worst_min_angle, q.min_corner_angle_deg);
      s.worst_max_angle = std::max(s.worst_max_angle, q.max_corner_angle_deg);
      s.worst_aspect = std::max(s.worst_aspect, q.aspect_ratio);
      if (q.min_corner_angle_deg < min_angle_threshold) ++s.below_min_angle;
      if (q.max_corner_angle_deg > thresholds.max_angle_deg) ++s.above_max_angle;
      if (q.aspect_ratio > thresholds.aspect_ratio) ++s.aspect_over_limit;
      if (q.shape_factor) {
        ++shaped;
        sum_shape += *q.shape_factor;
        s.worst_shape_factor = std::min(s.worst_shape_factor, *q.shape_factor);
        if (*q.shape_factor < thresholds.shape_factor) ++s.shape_below_limit;
      }
    }
    if (measured > 0) {
      s.average_min_angle = sum_min / measured;
      s.average_max_angle = sum_max / measured;
      s.average_aspect = sum_aspect / measured;
    } else {
      s.worst_min_angle = 0.0;
    }
    if (shaped > 0) {
      s.average_shape_factor = sum_shape / shaped;
    } else {
      s.worst_shape_factor = 0.0;
    }
    return s;
  };
  report.hex = reduce(ElementFamily::Hex, thresholds.min_angle_hex_deg);
  report.tet = reduce(ElementFamily::Tet, thresholds.min_angle_tet_deg);

  int degenerate = report.hex.degenerate + report.tet.degenerate;
  report.gate_pass = report.hex.above_max_angle + report.tet.above_max_angle == 0 &&
                     report.hex.aspect_over_limit + report.tet.aspect_over_limit == 0 &&
                     report.tet.shape_below_limit == 0 && degenerate == 0;
  return report;
}

namespace detail {

inline nlohmann::json family_json(const FamilyStats& s, bool with_shape) {
  nlohmann::json j{{"total_elements", s.total},
                   {"below_min_angle", s.below_min_angle},
                   {"average_min_angle_deg", s.average_min_angle},
                   {"worst_min_angle_deg", s.worst_min_angle},
                   {"above_max_angle", s.above_max_angle},
                   {"average_max_angle_deg", s.average_max_angle},
                   {"worst_max_angle_deg", s.worst_max_angle},
                   {"aspect_ratio_over_limit", s.aspect_over_limit},
                   {"average_aspect_ratio", s.average_aspect},
                   {"worst_aspect_ratio", s.worst_aspect},
                   {"degenerate", s.degenerate}};
  if (with_shape) {
    j["shape_factor_below_limit"] = s.shape_below_limit;
    j["average_shape_factor"] = s.average_shape_factor;
    j["worst_shape_factor"] = s.worst_shape_factor;
  }
  return j;
}

}  // namespace detail

inline nlohmann::json report_to_json(const QualityReport& report, bool per_element = false) {
  nlohmann::json j;
  j["thresholds"] = {{"min_angle_hex_deg", report.thresholds.min_angle_hex_deg},
                     {"min_angle_tet_deg", report.thresholds.min_angle_tet_deg},
                     {"max_angle_deg", report.thresholds.max_angle_deg},
                     {"aspect_ratio", report.thresholds.aspect_ratio},
                     {"shape_factor", report.thresholds.shape_factor}};
  j["hexahedral"] = detail::family_json(report.hex, false);
  j["tetrahedral"] = detail::family_json(report.tet, true);
  j["gate_pass"] = report.gate_pass;
  if (per_element) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : report.elements) {
      nlohmann::json row{{"element", e.element},
                         {"family", e.family == ElementFamily::Hex ? "hex" : "tet"},
                         {"min_angle_deg", e.min_corner_angle_deg},
                         {"max_angle_deg", e.max_corner_angle_deg},
                         {"aspect_ratio", e.aspect_ratio},
                         {"degenerate", e.degenerate}};
      if (e.shape_factor) row["shape_factor"] = *e.shape_factor;
      arr.push_back(row);
    }
    j["elements"] = arr;
  }
  return j;
}

// Plain-text table in the familiar two-column metric layout.
inline std::string report_to_text(const QualityReport& report) {
  std::ostringstream out;
  auto fmt = [](double v, int prec = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  auto row = [&](const std::string& label, const std::string& hex, const std::string& tet) {
    out << std::left << std::setw(34) << label << std::setw(20) << hex << tet << '\n';
  };
  const auto& h = report.hex;
  const auto& t = report.tet;
  row("Metric", "Hexahedral Mesh", "Tetrahedral Mesh");
  row("Total elements", std::to_string(h.total), std::to_string(t.total));
  row("Minimum angle < threshold",
      std::to_string(h.below_min_angle) + " (<" + fmt(report.thresholds.min_angle_hex_deg, 0) +
          " deg)",
      std::to_string(t.below_min_angle) + " (<" + fmt(report.thresholds.min_angle_tet_deg, 0) +
          " deg)");
  row("Average minimum angle", fmt(h.average_min_angle), fmt(t.average_min_angle));
  row("Worst minimum angle", fmt(h.worst_min_angle), fmt(t.worst_min_angle));
  row("Maximum angle > " + fmt(report.thresholds.max_angle_deg, 0) + " deg",
      std::to_string(h.above_max_angle), std::to_string(t.above_max_angle));
  row("Average maximum angle", fmt(h.average_max_angle), fmt(t.average_max_angle));
  row("Aspect ratio > " + fmt(report.thresholds.aspect_ratio, 0),
      std::to_string(h.aspect_over_limit), std::to_string(t.aspect_over_limit));
  row("Average aspect ratio", fmt(h.average_aspect), fmt(t.average_aspect));
  row("Worst aspect ratio", fmt(h.worst_aspect), fmt(t.worst_aspect));
  std::ostringstream shape_limit;
  shape_limit << report.thresholds.shape_factor;
  row("Shape factor < " + shape_limit.str(), "--", std::to_string(t.shape_below_limit));
  row("Average shape factor", "--", fmt(t.average_shape_factor, 4));
  row("Worst shape factor", "--", fmt(t.worst_shape_factor, 4));
  out << "Gate: " << (report.gate_pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace scan2sim::quality
