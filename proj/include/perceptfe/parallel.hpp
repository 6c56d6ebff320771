#pragma once

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
inline void omp_set_num_threads(int) {}
#endif

namespace pfe {

// Execution policy for the data-parallel kernels. Every parallel kernel has
// a serial twin used as the reference in tests and benchmarks; results must
// agree to 1e-12 across policies and thread counts.
enum class Exec { Serial, Parallel };

inline int max_threads() { return omp_get_max_threads(); }

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace pfe
