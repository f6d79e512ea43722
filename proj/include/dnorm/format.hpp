// Number formatting shared by the CLI and file writers: floats carry 17
// significant digits so round-trips are exact.
#pragma once

#include <cstdio>
#include <string>

namespace dnorm {

inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace dnorm
