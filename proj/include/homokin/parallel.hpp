#pragma once

#ifdef HOMOKIN_HAS_OPENMP
#include <omp.h>
#endif

namespace homokin::par {

enum class Exec { Serial, Parallel };

inline int hardware_jobs() {
#ifdef HOMOKIN_HAS_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_jobs(int n) {
#ifdef HOMOKIN_HAS_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Runs body(i) for i in [0, n). Workers write results into caller-owned
// index slots; any reduction the caller performs afterwards in index order is
// therefore bitwise identical between Serial and Parallel modes.
template <class Body>
void for_each_index(Exec mode, long n, Body&& body) {
#ifdef HOMOKIN_HAS_OPENMP
  if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)mode;
#endif
  for (long i = 0; i < n; ++i) body(i);
}

}  // namespace homokin::par
