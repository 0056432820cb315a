#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace blstab {

enum class Execution { Serial, Parallel };

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n). The parallel variant distributes indices
/// dynamically over `threads` OpenMP threads (0: the runtime default); the
/// first exception thrown by any body is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body, int threads = 0) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error = nullptr;
  const long long count = static_cast<long long>(n);
  const int nt = threads > 0 ? threads : worker_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(blstab_first_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace blstab
