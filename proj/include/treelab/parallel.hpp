#pragma once

#include <cstddef>
#include <functional>

namespace treelab {

// Worker count from TREELAB_WORKERS, else hardware concurrency (at least 1).
int default_workers();

// Runs body(i) for i in [0, count) on up to `workers` threads. Callers write
// results into per-index slots and reduce in index order afterwards, which
// keeps outputs independent of the worker count.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace treelab
