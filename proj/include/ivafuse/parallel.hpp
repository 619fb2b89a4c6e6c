#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

namespace ivafuse {

/// Runs body(i) for i in [0, n) on the OpenMP team. Iterations must write
/// disjoint outputs. If any iteration throws, the exception from the lowest
/// failing index is rethrown after the loop, so error reporting does not
/// depend on scheduling.
template <class Body>
void parallel_for(long n, Body&& body, int threads = 0) {
  std::exception_ptr error;
  long error_index = std::numeric_limits<long>::max();
  std::mutex mu;
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Set the default OpenMP team size (0 leaves the runtime default).
inline void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace ivafuse
