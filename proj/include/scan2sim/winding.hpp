#pragma once

#include <cmath>

#include "scan2sim/core.hpp"
#include "scan2sim/mesh.hpp"
#include "scan2sim/parallel.hpp"

namespace scan2sim {

// Signed solid angle of triangle (a,b,c) seen from p, via van Oosterom-Strackee.
inline double solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 u = a - p, v = b - p, w = c - p;
  double lu = norm(u), lv = norm(v), lw = norm(w);
  double det = dot(u, cross(v, w));
  double denom = lu * lv * lw + dot(u, v) * lw + dot(v, w) * lu + dot(w, u) * lv;
  return 2.0 * std::atan2(det, denom);
}

// Generalized winding number of p with respect to the surface (Jacobson et al. 2013).
// Exactly 1 inside / 0 outside a closed consistently-oriented mesh; degrades
// gracefully on the small holes neural reconstructions tend to leave.
inline double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (const auto& f : mesh.faces)
    total += solid_angle(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  return total / (4.0 * 3.14159265358979323846);
}

inline bool point_inside(const TriangleMesh& mesh, const Vec3& p) {
  return winding_number(mesh, p) >= 0.5;
}

}  // namespace scan2sim
