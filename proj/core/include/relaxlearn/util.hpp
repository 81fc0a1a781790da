#pragma once

#include <functional>

namespace relaxlearn {

// Process-wide cap on worker threads. Defaults to RELAXLEARN_THREADS if set,
// else 1. Work is split into fixed-size chunks with per-index output slots,
// so results are bit-identical for every thread count.
int max_threads();
void set_max_threads(int n);

void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace relaxlearn
