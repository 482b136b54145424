#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace elab {

// Execution policy for the batched kernels. Every parallel kernel in this
// library has a serial twin reached with Exec::serial; the two must produce
// bitwise-identical output (each work item is independent, no reductions).
enum class Exec { serial, par };

template <class F>
inline void parallel_for(std::ptrdiff_t n, F&& body, Exec exec = Exec::par) {
#ifdef _OPENMP
  if (exec == Exec::par && n > 1) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace elab
