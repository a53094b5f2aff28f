#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace hetprop {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, count) into at most `workers` contiguous ranges and runs
// fn(first, last) on each, one thread per range. Rethrows the first worker
// exception after all threads have joined.
template <typename Fn>
void parallel_for_ranges(std::uint64_t count, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    fn(std::uint64_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::uint64_t base = count / workers;
    const std::uint64_t extra = count % workers;
    std::uint64_t first = 0;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t last = first + base + (w < extra ? 1 : 0);
      threads.emplace_back([&, w, first, last] {
        try {
          fn(first, last);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
      first = last;
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace hetprop
