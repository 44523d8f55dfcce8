#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace msnet {

/// Parallelism budget handed to the Monte Carlo drivers.
struct ParallelOptions {
  int threads = 0;      // 0: machine parallelism
  bool serial = false;  // force the plain loop (reference path)
};

inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Runs body(i) for i in [0, count). Each index must write only its own
/// output slot; results then do not depend on scheduling.
template <class Body>
void for_each_index(std::size_t count, const ParallelOptions& opts, Body&& body) {
  const int threads = resolve_threads(opts.threads);
  if (opts.serial || threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace msnet
