#pragma once

#include <cstddef>
#include <functional>

namespace mgt {

// Worker count from, in priority order: explicit argument, MGT_THREADS,
// hardware concurrency. Always at least 1.
int resolve_thread_count(int requested = 0);

void set_default_thread_count(int n);
int default_thread_count();

// Runs fn(i) for i in [0, n) over contiguous index blocks. Each index writes
// only its own output slot, so results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace mgt
