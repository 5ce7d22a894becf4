#include "qcbridge/format.hpp"

#include <cstdio>

namespace qcbridge {

std::string format_double17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace qcbridge
