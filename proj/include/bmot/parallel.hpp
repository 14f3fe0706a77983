#pragma once

#include <cstddef>
#include <functional>

namespace bmot {

/// Worker cap from BMOT_THREADS, defaulting to the hardware concurrency.
int worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads. Tasks
/// must write only to their own output slot; callers reduce in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace bmot
