#pragma once
#include <cstddef>
#include <functional>

namespace mfsi {

// 0 means "use hardware concurrency".
void set_worker_count(int n);
int worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. The first
// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mfsi
