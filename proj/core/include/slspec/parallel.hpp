#pragma once

#include <cstddef>
#include <functional>

namespace slspec {

/// Worker cap: SLSPEC_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. The exception thrown by
/// the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace slspec
