#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace optomech {

/// Worker count: OPTOMECH_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs f(i) for i in [0, n) on up to worker_count() threads. Results must be
/// written by index so the outcome does not depend on scheduling. The
/// exception of the lowest failing index is rethrown.
template <typename F>
void parallel_for(std::size_t n, F&& f, std::size_t max_workers = 0) {
  std::size_t workers = max_workers ? max_workers : worker_count();
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, F&& f, std::size_t max_workers = 0) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); }, max_workers);
  return out;
}

}  // namespace optomech
