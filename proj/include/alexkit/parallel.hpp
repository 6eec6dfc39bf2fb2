#pragma once

#include <cstddef>
#include <cstdint>

namespace alexkit::parallel {

/// Number of worker threads the OpenMP kernels may use (1 without OpenMP).
int max_threads();

/// Caps the worker count. Values < 1 restore the runtime default.
/// Results never depend on this setting.
void set_threads(int n);

/// Applies ALEXKIT_THREADS from the environment if set; returns the value used (0 if unset).
int apply_env_threads();

/// True when the library was compiled with OpenMP.
bool openmp_enabled();

/// Runs body(i) for i in [0, n). Iterations must be independent; each writes
/// only to its own output slot, so the result is schedule-independent.
template <class Body>
void for_each_index(std::size_t n, Body&& body) {
  const auto count = static_cast<std::int64_t>(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

/// Serial counterpart of for_each_index; the reference path used in tests.
template <class Body>
void for_each_index_serial(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace alexkit::parallel
