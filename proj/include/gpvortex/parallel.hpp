#pragma once

#include <functional>
#include <vector>

namespace gpv {

// Worker count: GPVORTEX_THREADS if set, else the hardware concurrency.
int thread_count();
void set_thread_count(int n);  // 0 restores the environment default

// Runs f(i) for i in [0, n) over contiguous blocks. Callers that reduce
// store per-index partials and sum them in index order, so results do not
// depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& f);

// Index-ordered sum of per-index partials.
double ordered_sum(const std::vector<double>& parts);

}  // namespace gpv
