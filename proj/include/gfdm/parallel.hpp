#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gfdm/errors.hpp"

namespace gfdm {

// Worker cap from the GFDM_THREADS environment variable, or 0 if unset.
inline int env_thread_cap() {
  const char* raw = std::getenv("GFDM_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1)
    throw InvalidArgument(std::string("GFDM_THREADS must be a positive integer, got \"") + raw + "\"");
  return static_cast<int>(v);
}

// Number of workers to actually use: `requested` if positive, otherwise
// hardware concurrency; in both cases clamped by GFDM_THREADS.
inline int resolve_workers(int requested) {
  int n = requested;
  if (n <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
  }
  const int cap = env_thread_cap();
  if (cap > 0 && cap < n) n = cap;
  return n < 1 ? 1 : n;
}

// Run body(i) for i in [0, count) on up to `workers` threads.
//
// Work is handed out through a shared counter, so the i -> thread mapping is
// nondeterministic; callers must keep bodies independent per index and do any
// order-sensitive reduction themselves afterwards. Every index runs even if
// some throw, and the exception for the lowest index is rethrown; which error
// surfaces therefore never depends on thread timing.
inline void parallel_for(int count, int workers,
                         const std::function<void(int)>& body) {
  if (count <= 0) return;
  workers = resolve_workers(workers);
  if (workers > count) workers = count;

  if (workers == 1) {
    std::exception_ptr first;
    for (int i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};

  auto run = [&]() {
    while (true) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();

  if (failed.load()) {
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
}

}  // namespace gfdm
