#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "scan2sim/core.hpp"

namespace scan2sim::io {

// Piecewise-linear colormaps for field visualization. t in [0,1] -> linear RGB.
class Colormap {
 public:
  static Colormap named(const std::string& name) {
    if (name == "viridis") return Colormap{kViridis()};
    if (name == "jet") return Colormap{kJet()};
    if (name == "grayscale") return Colormap{{{0, 0, 0}, {1, 1, 1}}};
    throw MeshError("unknown colormap '" + name + "'");
  }

  std::array<float, 3> sample(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    double pos = t * (stops_.size() - 1);
    size_t lo = std::min(static_cast<size_t>(pos), stops_.size() - 2);
    double f = pos - lo;
    std::array<float, 3> c;
    for (int i = 0; i < 3; ++i)
      c[i] = static_cast<float>(stops_[lo][i] * (1.0 - f) + stops_[lo + 1][i] * f);
    return c;
  }

 private:
  explicit Colormap(std::vector<std::array<double, 3>> stops) : stops_(std::move(stops)) {}

  static std::vector<std::array<double, 3>> kViridis() {
    return {{0.267004, 0.004874, 0.329415}, {0.282623, 0.140926, 0.457517},
            {0.253935, 0.265254, 0.529983}, {0.206756, 0.371758, 0.553117},
            {0.163625, 0.471133, 0.558148}, {0.127568, 0.566949, 0.550556},
            {0.134692, 0.658636, 0.517649}, {0.266941, 0.748751, 0.440573},
            {0.477504, 0.821444, 0.318195}, {0.741388, 0.873449, 0.149561},
            {0.993248, 0.906157, 0.143936}};
  }
  static std::vector<std::array<double, 3>> kJet() {
    return {{0.0, 0.0, 0.5}, {0.0, 0.0, 1.0}, {0.0, 0.5, 1.0}, {0.0, 1.0, 1.0},
            {0.5, 1.0, 0.5}, {1.0, 1.0, 0.0}, {1.0, 0.5, 0.0}, {1.0, 0.0, 0.0},
            {0.5, 0.0, 0.0}};
  }

  std::vector<std::array<double, 3>> stops_;
};

}  // namespace scan2sim::io
