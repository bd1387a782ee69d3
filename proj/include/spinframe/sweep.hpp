#pragma once
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinframe::sweep {

// Thread count resolution: explicit request wins, then SPINFRAME_THREADS,
// then the OpenMP default. Returns 1 when built without OpenMP.
inline int resolve_threads(int requested = 0) {
#ifdef _OPENMP
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPINFRAME_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// Serial reference loop; the parallel kernel must agree with it exactly,
// so every index writes only its own output slot.
template <class Fn>
void run_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

// OpenMP point sweep. The first exception thrown by any iteration is
// captured and rethrown on the calling thread.
template <class Fn>
void run_parallel(std::size_t n, Fn&& fn, int threads = 0) {
#ifdef _OPENMP
  int nthreads = resolve_threads(threads);
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  (void)threads;
  run_serial(n, fn);
#endif
}

}  // namespace spinframe::sweep
