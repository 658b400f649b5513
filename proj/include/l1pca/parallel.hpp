#pragma once

#include <cstddef>
#include <functional>

namespace l1pca {

/// --threads / L1PCA_THREADS / hardware concurrency, in that order.
int default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent and write only to per-index slots; the first exception thrown
/// by any item is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace l1pca
