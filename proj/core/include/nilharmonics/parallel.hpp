#pragma once

#include <cstddef>
#include <functional>

namespace nilh {

// NILH_THREADS, else hardware concurrency; set_thread_count overrides both.
int thread_count();
void set_thread_count(int n);

// Sum of f(0..n-1). Partials are formed over fixed 1024-index chunks and combined by a
// pairwise tree, so the result does not depend on the thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& f);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

double pairwise_sum(const double* v, std::size_t n);

}  // namespace nilh
