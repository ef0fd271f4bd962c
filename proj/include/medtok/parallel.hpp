#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace medtok {

/// 0 means "all available cores".
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(chunk_index, begin, end) over contiguous chunks of [0, n).
/// Chunk boundaries depend only on n and the thread count, and callers
/// reduce per-chunk results in chunk order, so output never depends on
/// scheduling. If several chunks throw, the lowest chunk's exception wins.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t threads, Body&& body) {
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(1, n));
  if (threads <= 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    workers.emplace_back([&, t, begin, end] {
      try {
        body(t, begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  parallel_chunks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

inline std::size_t chunk_count(std::size_t n, std::size_t threads) {
  return std::min(resolve_threads(threads), std::max<std::size_t>(1, n));
}

}  // namespace medtok
