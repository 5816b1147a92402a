#pragma once

#include <exception>
#include <mutex>

#include <Eigen/Core>

namespace ocdmd::detail {

// Runs body(i) for i in [0, n) across OpenMP workers when available. The
// first exception thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(Eigen::Index n, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ocdmd::detail
