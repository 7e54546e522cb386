#pragma once

#include <cstddef>
#include <functional>

namespace tslab {

/// Worker count: the value from set_thread_count if positive, else
/// TSLAB_THREADS if set, else the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Calls body(begin, end) on contiguous blocks of [0, n). Blocks depend only on
/// n, so results written per index do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (cascade) summation; fixed association order.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace tslab
