#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gpman {

// Execution policy for the data-parallel kernels. Every parallel kernel has a
// serial twin that computes entries in the same order with the same scalar
// code, so results are bitwise identical; tests rely on that.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace gpman
