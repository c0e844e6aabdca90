#pragma once

// Deterministic data parallelism: the loop body writes results into slots
// keyed by index, reductions happen serially afterwards, so outputs are
// bit-identical at every worker count. Worker count is a process-wide cap
// set once by the front end.

#include <cstddef>
#include <functional>

namespace ifslab {

/// Set the worker cap (>= 1). Not thread-safe; call before parallel work starts.
void set_worker_threads(int n);
int worker_threads();

/// Run fn(i) for i in [0, n). Chunked across workers; exceptions from the
/// body are captured and rethrown (first one wins) after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ifslab
