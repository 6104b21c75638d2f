#pragma once

// Independent hex8 stiffness routine for cross-checking the library element:
// textbook formulation with explicitly tabulated shape-function derivatives and
// 3x3x3 Gauss-Legendre quadrature, written without reference to the library code.

#include <array>
#include <cmath>

#include "scan2sim/core.hpp"

namespace oracle {

using Mat24 = std::array<std::array<double, 24>, 24>;

inline Mat24 hex8_stiffness_reference(const std::array<scan2sim::Vec3, 8>& x, double E, double nu) {
  using scan2sim::Vec3;
  // material matrix
  double lam = E * nu / ((1 + nu) * (1 - 2 * nu));
  double mu = E / (2 * (1 + nu));
  double D[6][6] = {};
  D[0][0] = D[1][1] = D[2][2] = lam + 2 * mu;
  D[0][1] = D[0][2] = D[1][0] = D[1][2] = D[2][0] = D[2][1] = lam;
  D[3][3] = D[4][4] = D[5][5] = mu;

  const double xi_n[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
  const double eta_n[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
  const double zeta_n[8] = {-1, -1, -1, -1, 1, 1, 1, 1};

  const double g = std::sqrt(3.0 / 5.0);
  const double gauss_pt[3] = {-g, 0.0, g};
  const double gauss_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  Mat24 K{};
  for (int ix = 0; ix < 3; ++ix)
    for (int iy = 0; iy < 3; ++iy)
      for (int iz = 0; iz < 3; ++iz) {
        double xi = gauss_pt[ix], eta = gauss_pt[iy], zeta = gauss_pt[iz];
        double w = gauss_w[ix] * gauss_w[iy] * gauss_w[iz];

        double dref[8][3];
        for (int a = 0; a < 8; ++a) {
          dref[a][0] = xi_n[a] * (1 + eta_n[a] * eta) * (1 + zeta_n[a] * zeta) / 8.0;
          dref[a][1] = eta_n[a] * (1 + xi_n[a] * xi) * (1 + zeta_n[a] * zeta) / 8.0;
          dref[a][2] = zeta_n[a] * (1 + xi_n[a] * xi) * (1 + eta_n[a] * eta) / 8.0;
        }
        double J[3][3] = {};
        for (int a = 0; a < 8; ++a) {
          double coords[3] = {x[a].x, x[a].y, x[a].z};
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) J[i][j] += coords[i] * dref[a][j];
        }
        double det = J[0][0] * J[1][1] * J[2][2] + J[0][1] * J[1][2] * J[2][0] +
                     J[0][2] * J[1][0] * J[2][1] - J[0][2] * J[1][1] * J[2][0] -
                     J[0][1] * J[1][0] * J[2][2] - J[0][0] * J[1][2] * J[2][1];
        double inv[3][3];
        inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) / det;
        inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / det;
        inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / det;
        inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) / det;
        inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / det;
        inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / det;
        inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) / det;
        inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / det;
        inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / det;

        double dphys[8][3];
        for (int a = 0; a < 8; ++a)
          for (int i = 0; i < 3; ++i)
            dphys[a][i] =
                dref[a][0] * inv[0][i] + dref[a][1] * inv[1][i] + dref[a][2] * inv[2][i];

        double B[6][24] = {};
        for (int a = 0; a < 8; ++a) {
          B[0][3 * a] = dphys[a][0];
          B[1][3 * a + 1] = dphys[a][1];
          B[2][3 * a + 2] = dphys[a][2];
          B[3][3 * a] = dphys[a][1];
          B[3][3 * a + 1] = dphys[a][0];
          B[4][3 * a + 1] = dphys[a][2];
          B[4][3 * a + 2] = dphys[a][1];
          B[5][3 * a] = dphys[a][2];
          B[5][3 * a + 2] = dphys[a][0];
        }
        for (int i = 0; i < 24; ++i)
          for (int j = 0; j < 24; ++j) {
            double acc = 0.0;
            for (int m = 0; m < 6; ++m)
              for (int l = 0; l < 6; ++l) acc += B[m][i] * D[m][l] * B[l][j];
            K[i][j] += acc * det * w;
          }
      }
  return K;
}

}  // namespace oracle
