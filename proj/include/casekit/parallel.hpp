#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace casekit {

// Effective worker count: 0 means "all hardware threads", 1 forces the
// serial path.
inline int effective_threads(int requested) {
#ifdef _OPENMP
  if (requested <= 0) return omp_get_max_threads();
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

// Index-parallel map over [0, n). Each index writes only its own output
// slot, so results are identical for every worker count. threads == 1 runs
// the plain serial loop. Exceptions thrown by the body are captured and the
// first one (by index) is rethrown once the loop finishes.
template <class Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
  int workers = effective_threads(threads);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr first_error = nullptr;
  std::size_t first_error_index = n;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (static_cast<std::size_t>(i) < first_error_index) {
        first_error = std::current_exception();
        first_error_index = static_cast<std::size_t>(i);
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace casekit
