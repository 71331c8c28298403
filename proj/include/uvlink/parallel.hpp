#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace uvlink {

/// OpenMP loop over [0, count) that carries the first exception thrown by
/// `body` out of the parallel region and rethrows it on the calling thread.
template <typename Body>
void parallel_for(std::int64_t count, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace uvlink
