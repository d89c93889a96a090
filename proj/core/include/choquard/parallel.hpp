#pragma once

#include <cstddef>
#include <functional>

namespace choquard {

// Process-wide worker count. 1 (the default) runs everything inline.
void set_thread_count(int threads);
int thread_count();

// Runs body(begin, end) over fixed-size blocks of [0, n). Block boundaries do
// not depend on the thread count, so block-local reductions combined in block
// order give the same bits for any number of threads.
void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t)>& body);

// Sum of term(begin, end) over fixed blocks, combined in block order.
double parallel_sum(std::size_t n, std::size_t block,
                    const std::function<double(std::size_t, std::size_t)>& term);

}  // namespace choquard
