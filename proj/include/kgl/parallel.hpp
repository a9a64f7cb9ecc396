#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kgl {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
/// Work items must be independent; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn &&fn, unsigned max_threads = 0) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned nt = static_cast<unsigned>(std::min<std::size_t>(n, max_threads ? max_threads : hw));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (err) std::rethrow_exception(err);
}

} // namespace kgl
