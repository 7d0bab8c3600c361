#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace unigraph {

/// Worker count: hardware concurrency, capped by UNIGRAPH_THREADS when set (>= 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. The first exception
/// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// out[i] = fn(i), order-independent of scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace unigraph
