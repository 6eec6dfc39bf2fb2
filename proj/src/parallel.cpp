#include "alexkit/parallel.hpp"

#include <cstdlib>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace alexkit::parallel {
namespace {
#if defined(_OPENMP)
const int kDefaultThreads = omp_get_max_threads();
#endif
}  // namespace

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#if defined(_OPENMP)
  omp_set_num_threads(n < 1 ? kDefaultThreads : n);
#else
  (void)n;
#endif
}

int apply_env_threads() {
  const char* env = std::getenv("ALEXKIT_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int n = 0;
  try {
    n = std::stoi(env);
  } catch (...) {
    return 0;
  }
  if (n > 0) set_threads(n);
  return n > 0 ? n : 0;
}

bool openmp_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

}  // namespace alexkit::parallel
