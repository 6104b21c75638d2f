#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "scan2sim/mesh.hpp"

namespace fixtures {

using scan2sim::TriangleMesh;
using scan2sim::Vec3;
using scan2sim::VolumeMesh;

constexpr double kPi = 3.14159265358979323846;

// Unit-radius icosahedron subdivided n times and projected to radius r.
inline TriangleMesh icosphere(int subdivisions, double radius = 1.0, Vec3 center = {0, 0, 0}) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]) * 0.5);
      midpoint[key] = static_cast<int>(verts.size()) - 1;
      return static_cast<int>(verts.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.faces = faces;
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(center + scan2sim::normalized(v) * radius);
  return mesh;
}

// Closed axis-aligned box, 12 triangles, outward winding.
inline TriangleMesh box_mesh(Vec3 lo, Vec3 hi) {
  TriangleMesh m;
  m.vertices = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  const int quads[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                           {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

// Torus triangulated from a (major, minor) parameter grid; closed manifold.
inline TriangleMesh torus(double major_r, double minor_r, int nu = 48, int nv = 24) {
  TriangleMesh m;
  for (int i = 0; i < nu; ++i) {
    double u = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      double v = 2.0 * kPi * j / nv;
      double w = major_r + minor_r * std::cos(v);
      m.vertices.push_back({w * std::cos(u), w * std::sin(u), minor_r * std::sin(v)});
    }
  }
  auto vid = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  return m;
}

// Smoothly bumped sphere: radius modulated by low-order spherical harmonics-ish
// terms. Closed, moderate curvature variation, good remesh benchmark.
inline TriangleMesh bumpy_sphere(double radius = 10.0, double amplitude = 0.15) {
  TriangleMesh m = icosphere(3, 1.0);
  for (auto& v : m.vertices) {
    double theta = std::acos(std::clamp(v.z, -1.0, 1.0));
    double phi = std::atan2(v.y, v.x);
    double r = radius * (1.0 + amplitude * std::sin(3 * theta) * std::cos(2 * phi));
    v = v * r;
  }
  return m;
}

// Regular triangulated grid in the z=0 plane: (nx+1)*(ny+1) vertices. Row spacing
// chosen so all triangles are equilateral with the given edge length.
inline TriangleMesh equilateral_grid(int nx, int ny, double edge = 1.0) {
  TriangleMesh m;
  double h = edge * std::sqrt(3.0) / 2.0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({(i + 0.5 * (j % 2)) * edge, j * h, 0.0});
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i, j + 1), d = vid(i + 1, j + 1);
      if (j % 2 == 0) {
        m.faces.push_back({a, b, c});
        m.faces.push_back({b, d, c});
      } else {
        m.faces.push_back({a, b, d});
        m.faces.push_back({a, d, c});
      }
    }
  return m;
}

// Hexagonal patch of the equilateral triangular lattice, `rings` rings around the
// center. All interior valences are 6; the boundary alternates 3 (corners) and 4.
inline TriangleMesh hexagon_patch(int rings, double edge = 1.0) {
  TriangleMesh m;
  std::map<std::pair<int, int>, int> index;  // axial coordinates
  for (int q = -rings; q <= rings; ++q)
    for (int r = -rings; r <= rings; ++r) {
      if (std::abs(q + r) > rings) continue;
      double x = edge * (q + r * 0.5);
      double y = edge * r * std::sqrt(3.0) / 2.0;
      index[{q, r}] = m.vertex_count();
      m.vertices.push_back({x, y, 0.0});
    }
  for (const auto& [qr, id] : index) {
    auto [q, r] = qr;
    auto at = [&](int qq, int rr) {
      auto it = index.find({qq, rr});
      return it == index.end() ? -1 : it->second;
    };
    int right = at(q + 1, r), up = at(q, r + 1), upleft = at(q - 1, r + 1);
    if (right >= 0 && up >= 0) m.faces.push_back({id, right, up});
    if (up >= 0 && upleft >= 0) m.faces.push_back({id, up, upleft});
  }
  return m;
}

// nx x ny x nz block of unit voxels scaled by h, with "bottom"/"top" z-layer sets.
inline VolumeMesh voxel_block(int nx, int ny, int nz, double h = 1.0, Vec3 origin = {0, 0, 0}) {
  VolumeMesh m;
  auto nid = [&](int i, int j, int k) { return (i * (ny + 1) + j) * (nz + 1) + k; };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        m.nodes.push_back(origin + Vec3{i * h, j * h, k * h});
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k)
        m.hex_elements.push_back({nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k),
                                  nid(i, j + 1, k), nid(i, j, k + 1), nid(i + 1, j, k + 1),
                                  nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)});
  std::vector<int> bottom, top;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      bottom.push_back(nid(i, j, 0));
      top.push_back(nid(i, j, nz));
    }
  m.node_sets["bottom"] = bottom;
  m.node_sets["top"] = top;
  return m;
}

// Overlapping closed boxes forming a four-legged stool; winding-number friendly.
inline TriangleMesh stool(double seat = 40.0, double seat_h = 8.0, double leg = 8.0,
                          double height = 40.0) {
  TriangleMesh m;
  auto append = [&](const TriangleMesh& part) {
    int base = m.vertex_count();
    m.vertices.insert(m.vertices.end(), part.vertices.begin(), part.vertices.end());
    for (auto f : part.faces) m.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  };
  append(box_mesh({0, 0, height - seat_h}, {seat, seat, height}));
  double inset = 2.0;
  for (int ix = 0; ix < 2; ++ix)
    for (int iy = 0; iy < 2; ++iy) {
      double x0 = ix == 0 ? inset : seat - inset - leg;
      double y0 = iy == 0 ? inset : seat - inset - leg;
      append(box_mesh({x0, y0, 0}, {x0 + leg, y0 + leg, height - seat_h + 1.0}));
    }
  return m;
}

}  // namespace fixtures
