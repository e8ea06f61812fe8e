// Replication-parallel Monte Carlo driver. Work is split by replication
// index; every replication derives its own streams from a StreamFactory, so
// the result is independent of the thread count.

#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adex {

// Calls fn(rep) for rep in [0, reps), possibly from several threads. Any
// exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(long reps, int threads, Fn&& fn) {
  if (threads <= 1 || reps < 2) {
    for (long r = 0; r < reps; ++r) fn(r);
    return;
  }
  const int workers = static_cast<int>(
      std::min<long>(threads, reps));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr error;
  std::mutex error_mu;
  std::atomic<long> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long r = next.fetch_add(1);
        if (r >= reps) return;
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Convenience: fills out[rep] = fn(rep) with deterministic slot assignment.
template <typename T, typename Fn>
std::vector<T> parallel_map(long reps, int threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(reps));
  parallel_for(reps, threads,
               [&](long r) { out[static_cast<std::size_t>(r)] = fn(r); });
  return out;
}

}  // namespace adex
