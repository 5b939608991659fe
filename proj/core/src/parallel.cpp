#include "irtid/parallel.hpp"

#include <cstdlib>
#include <string>

namespace irtid {

std::size_t worker_count() {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("IRT_IDENTIFY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // Malformed values fall back to the hardware count.
    }
  }
  return hw;
}

}  // namespace irtid
