#pragma once

#include <cstddef>
#include <functional>

namespace gridfluct {

/// Worker count: GRIDFLUCT_THREADS when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t thread_budget();

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 means thread_budget()).
/// If any call throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace gridfluct
