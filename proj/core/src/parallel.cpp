#include "crspectra/parallel.hpp"

#include <cstdlib>
#include <string>

namespace crspectra {

namespace detail {
thread_local bool tls_in_worker = false;
}  // namespace detail

int worker_count() {
  if (const char* env = std::getenv("CR_SPECTRA_THREADS")) {
    try {
      const int n = std::stoi(env);
      return n >= 1 ? n : 1;
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace crspectra
