#include <choquard/parallel.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace choquard {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int thread_count() { return g_threads; }

void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  block = std::max<std::size_t>(block, 1);
  const std::size_t blocks = (n + block - 1) / block;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(thread_count(), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < blocks; b = next++) {
        try {
          body(b * block, std::min(n, (b + 1) * block));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double parallel_sum(std::size_t n, std::size_t block,
                    const std::function<double(std::size_t, std::size_t)>& term) {
  if (n == 0) return 0.0;
  block = std::max<std::size_t>(block, 1);
  std::vector<double> partial((n + block - 1) / block, 0.0);
  parallel_blocks(n, block, [&](std::size_t begin, std::size_t end) {
    partial[begin / block] = term(begin, end);
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace choquard
