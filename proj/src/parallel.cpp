#include "agequeue/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace agequeue {

int worker_count() {
  int workers = omp_get_max_threads();
  if (const char* env = std::getenv("AGEQUEUE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) workers = std::min(workers, cap);
    } catch (const std::exception&) {
      // unparsable cap is ignored
    }
  }
  return std::max(workers, 1);
}

}  // namespace agequeue
