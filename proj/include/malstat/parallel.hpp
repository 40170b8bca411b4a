#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace malstat::par {

// Global worker cap. 0 means "use the OpenMP default".
void set_threads(int n);
int threads();

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Parallel loop over [0, n). Each index must write only to its own slots so
// results stay deterministic regardless of scheduling.
template <typename Fn>
void for_index(std::int64_t n, Fn&& fn) {
  const int t = threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(t > 0 ? t : omp_get_max_threads())
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    fn(i);
  }
}

// Dynamic schedule for loops with uneven per-item cost (file processing).
template <typename Fn>
void for_index_dynamic(std::int64_t n, Fn&& fn) {
  const int t = threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(t > 0 ? t : omp_get_max_threads())
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    fn(i);
  }
}

}  // namespace malstat::par
