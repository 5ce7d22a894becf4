#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qcbridge {

// BRIDGE_WORKERS if set, otherwise the hardware concurrency (at least 1).
int default_worker_count();

// Runs fn(task) for task in [0, tasks) on up to `workers` threads. Tasks must
// write to disjoint, pre-sized outputs; callers reduce them in index order, so
// results never depend on the worker count. The lowest-index exception wins.
template <class Fn>
void parallel_for(std::size_t tasks, Fn&& fn, int workers = default_worker_count()) {
  if (workers <= 1 || tasks <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      try {
        fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qcbridge
