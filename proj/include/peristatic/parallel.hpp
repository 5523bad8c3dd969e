// Thread helpers with a hard determinism contract: every result is
// bit-identical for any thread count. Parallel loops only ever write to
// disjoint output slots; reductions use fixed-size chunks folded in order,
// so the chunking (and therefore the rounding) never depends on how many
// threads happened to run.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace peristatic {

namespace detail {
inline std::atomic<unsigned>& thread_count_slot() {
  static std::atomic<unsigned> n{0};  // 0 = not yet resolved
  return n;
}

inline unsigned resolve_default_threads() {
  if (const char* env = std::getenv("PERISTATIC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}
}  // namespace detail

inline void set_threads(unsigned n) {
  detail::thread_count_slot().store(n == 0 ? 1u : n);
}

inline unsigned thread_count() {
  unsigned n = detail::thread_count_slot().load();
  if (n == 0) {
    n = detail::resolve_default_threads();
    detail::thread_count_slot().store(n);
  }
  return n;
}

// Runs body(begin, end) over a static contiguous partition of [0, n).
// Work below min_grain stays on the calling thread.
template <class Body>
void parallel_for(std::size_t n, const Body& body, std::size_t min_grain = 1024) {
  if (n == 0) return;
  unsigned t = thread_count();
  if (t > 1 && n / t < min_grain) t = static_cast<unsigned>(std::max<std::size_t>(1, n / min_grain));
  if (t <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + t - 1) / t;
  std::vector<std::thread> workers;
  workers.reserve(t - 1);
  std::exception_ptr first_error;
  std::atomic<bool> has_error{false};
  for (unsigned w = 1; w < t; ++w) {
    const std::size_t b = std::min(n, w * chunk);
    const std::size_t e = std::min(n, (w + 1) * chunk);
    if (b >= e) break;
    workers.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        if (!has_error.exchange(true)) first_error = std::current_exception();
      }
    });
  }
  try {
    body(std::size_t{0}, std::min(n, chunk));
  } catch (...) {
    if (!has_error.exchange(true)) first_error = std::current_exception();
  }
  for (auto& w : workers) w.join();
  if (has_error) std::rethrow_exception(first_error);
}

// Deterministic parallel sum: partials over fixed 4096-element chunks,
// folded sequentially in chunk order.
template <class Term>
double deterministic_sum(std::size_t n, const Term& term) {
  constexpr std::size_t kChunk = 4096;
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(
      nchunks,
      [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
          const std::size_t b = c * kChunk;
          const std::size_t e = std::min(n, b + kChunk);
          double s = 0.0;
          for (std::size_t i = b; i < e; ++i) s += term(i);
          partial[c] = s;
        }
      },
      1);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace peristatic
