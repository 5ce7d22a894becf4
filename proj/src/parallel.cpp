#include "qcbridge/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qcbridge {

int default_worker_count() {
  if (const char* env = std::getenv("BRIDGE_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace qcbridge
