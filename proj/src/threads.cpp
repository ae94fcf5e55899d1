#include "reductcheck/threads.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace reductcheck {

int configure_threads_from_env()
{
  if (const char* raw = std::getenv("REDUCTCHECK_THREADS")) {
    char* end = nullptr;
    const long requested = std::strtol(raw, &end, 10);
    if (end != raw && *end == '\0' && requested > 0) {
      omp_set_num_threads(static_cast<int>(std::min<long>(requested, omp_get_num_procs())));
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

} // namespace reductcheck
