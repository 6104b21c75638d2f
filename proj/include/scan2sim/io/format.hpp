#pragma once

#include <cstdio>
#include <string>

namespace scan2sim::io::detail {

// 9 significant digits: enough to round-trip single-precision reconstruction
// output while keeping text artifacts byte-stable.
inline std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace scan2sim::io::detail
