#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

// Deterministic task-parallel helpers. Work is split into a fixed number of
// contiguous ranges that depends only on the problem size, never on the
// thread count; threads pull ranges from a shared counter. Per-range results
// are reduced sequentially by the caller, so floating-point outputs are
// bit-identical for any thread count.
namespace levyspec::parallel {

int thread_count();
void set_thread_count(int k);

inline constexpr std::size_t kMaxTasks = 256;

// Invokes fn(task_id, begin, end) for task-sized ranges covering [0, n).
// Task boundaries depend only on n.
void for_tasks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Convenience: per-item function.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn);

namespace detail {

inline std::atomic<int>& thread_count_storage() {
  static std::atomic<int> count{1};
  return count;
}

}  // namespace detail

inline int thread_count() { return detail::thread_count_storage().load(); }

inline void set_thread_count(int k) {
  detail::thread_count_storage().store(k < 1 ? 1 : k);
}

inline void for_tasks(std::size_t n,
                      const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t tasks = n < kMaxTasks ? n : kMaxTasks;
  const int workers_wanted = thread_count();
  const std::size_t workers =
      std::size_t(workers_wanted) < tasks ? std::size_t(workers_wanted) : tasks;

  auto run_task = [&](std::size_t t) {
    const std::size_t begin = n * t / tasks;
    const std::size_t end = n * (t + 1) / tasks;
    fn(t, begin, end);
  };

  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic<int> error_claim{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks || failed.load()) return;
      try {
        run_task(t);
      } catch (...) {
        if (error_claim.fetch_add(1) == 0) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failed.load() && first_error) std::rethrow_exception(first_error);
}

inline void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for_tasks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace levyspec::parallel
