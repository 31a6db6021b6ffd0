#pragma once

#include <cstddef>
#include <functional>

namespace mechtomo {

// Worker count used by parallel_for. 0 selects std::thread::hardware_concurrency().
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Calls body(i) for every i in [0, n). Each index is visited exactly once;
// callers write results into per-index slots so output never depends on
// scheduling. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mechtomo
