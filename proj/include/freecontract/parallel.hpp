#pragma once

#include <cstddef>
#include <functional>

namespace fc {

// Worker count: FREECONTRACT_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads. Callers write
// results into pre-sized slots, so output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fc
