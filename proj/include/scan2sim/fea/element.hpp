#pragma once

#include <array>
#include <cmath>

#include "scan2sim/core.hpp"
#include "scan2sim/fea/model.hpp"
#include "scan2sim/mesh.hpp"

namespace scan2sim::fea {

template <int N>
using ElementMatrix = std::array<std::array<double, N>, N>;

using Mat6 = std::array<std::array<double, 6>, 6>;

// Isotropic elasticity matrix in Voigt order (xx, yy, zz, xy, yz, zx) with
// engineering shear strains.
inline Mat6 elasticity_matrix(const Material& m) {
  m.validate();
  double e = m.young_modulus_mpa, nu = m.poisson_ratio;
  double lambda = e * nu / ((1 + nu) * (1 - 2 * nu));
  double mu = e / (2 * (1 + nu));
  Mat6 d{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d[i][j] = lambda;
    d[i][i] = lambda + 2 * mu;
    d[i + 3][i + 3] = mu;
  }
  return d;
}

namespace detail {

inline const int (&hex_ref_sign())[8][3] {
  static const int sign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                 {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  return sign;
}

struct HexGradients {
  std::array<std::array<double, 3>, 8> dndx;  // physical shape-function gradients
  double det_j = 0.0;
};

inline HexGradients hex_gradients(const std::array<Vec3, 8>& x, double xi, double eta,
                                  double zeta) {
  const auto& s = hex_ref_sign();
  std::array<std::array<double, 3>, 8> dn;  // reference gradients
  for (int a = 0; a < 8; ++a) {
    dn[a][0] = 0.125 * s[a][0] * (1 + s[a][1] * eta) * (1 + s[a][2] * zeta);
    dn[a][1] = 0.125 * s[a][1] * (1 + s[a][0] * xi) * (1 + s[a][2] * zeta);
    dn[a][2] = 0.125 * s[a][2] * (1 + s[a][0] * xi) * (1 + s[a][1] * eta);
  }
  double J[3][3] = {};  // J[i][j] = dx_i/dxi_j
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) J[i][j] += x[a][i] * dn[a][j];

  double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
               J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
               J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  if (det <= 0.0) throw MeshError("hex element with non-positive Jacobian");
  double inv[3][3] = {
      {(J[1][1] * J[2][2] - J[1][2] * J[2][1]) / det, (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / det,
       (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / det},
      {(J[1][2] * J[2][0] - J[1][0] * J[2][2]) / det, (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / det,
       (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / det},
      {(J[1][0] * J[2][1] - J[1][1] * J[2][0]) / det, (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / det,
       (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / det}};

  HexGradients g;
  g.det_j = det;
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      g.dndx[a][i] = dn[a][0] * inv[0][i] + dn[a][1] * inv[1][i] + dn[a][2] * inv[2][i];
  return g;
}

// Strain-displacement rows for one node's gradient; fills columns 3a..3a+2.
template <int N>
inline void accumulate_btdb(ElementMatrix<N>& k, const std::array<std::array<double, 3>, N / 3>& dndx,
                            const Mat6& d, double weight) {
  constexpr int nodes = N / 3;
  // B is sparse; expand products directly. b row layout per node a:
  //   [dx  0  0; 0 dy 0; 0 0 dz; dy dx 0; 0 dz dy; dz 0 dx]
  std::array<std::array<double, N>, 6> b{};
  for (int a = 0; a < nodes; ++a) {
    double dx = dndx[a][0], dy = dndx[a][1], dz = dndx[a][2];
    int c = 3 * a;
    b[0][c] = dx;
    b[1][c + 1] = dy;
    b[2][c + 2] = dz;
    b[3][c] = dy;
    b[3][c + 1] = dx;
    b[4][c + 1] = dz;
    b[4][c + 2] = dy;
    b[5][c] = dz;
    b[5][c + 2] = dx;
  }
  std::array<std::array<double, N>, 6> db{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += d[i][m] * b[m][j];
      db[i][j] = acc;
    }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 6; ++m) acc += b[m][i] * db[m][j];
      k[i][j] += weight * acc;
    }
}

}  // namespace detail

// 24x24 hex8 stiffness via 2x2x2 Gauss quadrature of B^T D B.
inline ElementMatrix<24> hex_stiffness(const std::array<Vec3, 8>& corners, const Material& mat) {
  Mat6 d = elasticity_matrix(mat);
  ElementMatrix<24> k{};
  constexpr double gp = 0.57735026918962576451;  // 1/sqrt(3)
  for (int gx = 0; gx < 2; ++gx)
    for (int gy = 0; gy < 2; ++gy)
      for (int gz = 0; gz < 2; ++gz) {
        auto g = detail::hex_gradients(corners, gx ? gp : -gp, gy ? gp : -gp, gz ? gp : -gp);
        detail::accumulate_btdb<24>(k, g.dndx, d, g.det_j);
      }
  return k;
}

// Constant-strain tet4 stiffness, exact single-point integration.
inline ElementMatrix<12> tet_stiffness(const std::array<Vec3, 4>& corners, const Material& mat) {
  Mat6 d = elasticity_matrix(mat);
  double volume = tet_signed_volume(corners[0], corners[1], corners[2], corners[3]);
  if (volume <= 0.0) throw MeshError("tet element with non-positive volume");
  auto grads = [&]() {
    Vec3 u = corners[1] - corners[0], v = corners[2] - corners[0], w = corners[3] - corners[0];
    double det = dot(u, cross(v, w));
    Vec3 g1 = cross(v, w) / det, g2 = cross(w, u) / det, g3 = cross(u, v) / det;
    std::array<std::array<double, 3>, 4> g;
    for (int i = 0; i < 3; ++i) {
      g[1][i] = g1[i];
      g[2][i] = g2[i];
      g[3][i] = g3[i];
      g[0][i] = -(g1[i] + g2[i] + g3[i]);
    }
    return g;
  }();
  ElementMatrix<12> k{};
  detail::accumulate_btdb<12>(k, grads, d, volume);
  return k;
}

// Strain at the element center from nodal displacements (Voigt, engineering shear).
inline std::array<double, 6> hex_center_strain(const std::array<Vec3, 8>& corners,
                                               const std::array<Vec3, 8>& u) {
  auto g = detail::hex_gradients(corners, 0.0, 0.0, 0.0);
  std::array<double, 6> e{};
  for (int a = 0; a < 8; ++a) {
    double dx = g.dndx[a][0], dy = g.dndx[a][1], dz = g.dndx[a][2];
    e[0] += dx * u[a].x;
    e[1] += dy * u[a].y;
    e[2] += dz * u[a].z;
    e[3] += dy * u[a].x + dx * u[a].y;
    e[4] += dz * u[a].y + dy * u[a].z;
    e[5] += dz * u[a].x + dx * u[a].z;
  }
  return e;
}

inline std::array<double, 6> tet_strain(const std::array<Vec3, 4>& corners,
                                        const std::array<Vec3, 4>& u) {
  Vec3 uu = corners[1] - corners[0], v = corners[2] - corners[0], w = corners[3] - corners[0];
  double det = dot(uu, cross(v, w));
  if (det == 0.0) throw MeshError("degenerate tet");
  Vec3 g1 = cross(v, w) / det, g2 = cross(w, uu) / det, g3 = cross(uu, v) / det;
  std::array<std::array<double, 3>, 4> g;
  for (int i = 0; i < 3; ++i) {
    g[1][i] = g1[i];
    g[2][i] = g2[i];
    g[3][i] = g3[i];
    g[0][i] = -(g1[i] + g2[i] + g3[i]);
  }
  std::array<double, 6> e{};
  for (int a = 0; a < 4; ++a) {
    double dx = g[a][0], dy = g[a][1], dz = g[a][2];
    e[0] += dx * u[a].x;
    e[1] += dy * u[a].y;
    e[2] += dz * u[a].z;
    e[3] += dy * u[a].x + dx * u[a].y;
    e[4] += dz * u[a].y + dy * u[a].z;
    e[5] += dz * u[a].x + dx * u[a].z;
  }
  return e;
}

inline std::array<double, 6> stress_from_strain(const Mat6& d, const std::array<double, 6>& e) {
  std::array<double, 6> s{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) s[i] += d[i][j] * e[j];
  return s;
}

// von Mises equivalent stress from a Voigt tensor (xx, yy, zz, xy, yz, zx).
inline double von_mises(const std::array<double, 6>& s) {
  double a = s[0] - s[1], b = s[1] - s[2], c = s[2] - s[0];
  return std::sqrt(0.5 * (a * a + b * b + c * c) +
                   3.0 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]));
}

}  // namespace scan2sim::fea
