#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>

#include "mdlab/exec.hpp"

namespace mdlab::detail {

// Runs fn(i) for i in [0, n). Exceptions thrown inside the OpenMP region are
// captured and the first one is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex m;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(m);
      if (!error) error = std::current_exception();
      failed = true;
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mdlab::detail
