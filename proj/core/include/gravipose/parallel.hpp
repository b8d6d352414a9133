#pragma once

#include <cstddef>
#include <functional>

namespace gravipose {

/// Worker count: GRAVIPOSE_THREADS when set to a positive integer, otherwise
/// (unset or 0) the hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads, contiguous
/// chunks per thread. fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gravipose
