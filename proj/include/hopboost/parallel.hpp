#pragma once

#include <cstddef>
#include <functional>

namespace hopboost {

// Worker count from HB_THREADS (unset, invalid or < 1 -> 1).
std::size_t thread_count();

// Calls fn(i) for i in [0, n). Each index is handled by exactly one worker, so
// results written per index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hopboost
