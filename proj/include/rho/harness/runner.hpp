#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rho/harness/report.hpp"

namespace rho::harness {

// Seed of sweep point k: distinct points get unrelated Philox keys.
inline std::uint64_t sweep_seed(std::uint64_t seed, std::size_t sweep_index) {
  return seed + static_cast<std::uint64_t>(sweep_index) * 0x9E3779B97F4A7C15ull;
}

// Runs fn(rep) for rep in [0, reps) on `threads` workers. Each replication
// fills its own slot; the output is concatenated in replication order, so
// it does not depend on the worker count.
template <class F>
std::vector<Record> run_reps(std::size_t reps, std::size_t threads, F&& fn) {
  std::vector<std::vector<Record>> slots(reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        slots[r] = fn(r);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(reps, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<Record> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

}  // namespace rho::harness
