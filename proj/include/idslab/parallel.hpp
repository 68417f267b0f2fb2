#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace idslab {

/// Parallelism degree plus a memory budget shared by concurrently running tasks.
struct Scheduler {
  unsigned jobs = 1;
  std::size_t memory_budget = std::size_t{2} << 30;  // bytes
};

/// Runs f(i) for i in [0, n) on up to `jobs` threads; results keep index order.
/// cost(i) is the memory a task holds while running; tasks wait until the sum
/// of running costs fits the budget (an oversized task runs alone).
template <class F, class Cost>
auto parallel_map(std::size_t n, const Scheduler& sched, F&& f, Cost&& cost) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(sched.jobs, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable cv;
  std::size_t in_use = 0;
  std::size_t running = 0;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const std::size_t c = cost(i);
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return running == 0 || in_use + c <= sched.memory_budget; });
        in_use += c;
        ++running;
      }
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        in_use -= c;
        --running;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class F>
auto parallel_map(std::size_t n, const Scheduler& sched, F&& f) {
  return parallel_map(n, sched, std::forward<F>(f), [](std::size_t) { return std::size_t{0}; });
}

/// Pairwise (cascade) summation; the result does not depend on thread timing.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace idslab
