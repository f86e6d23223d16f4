#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace zener {

// Runs body(i) for i in [0, count) on `threads` workers, each taking a
// contiguous chunk.  Callers write to disjoint slots, so results do not
// depend on the thread count.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const int end = std::min(count, (t + 1) * chunk);
        for (int i = t * chunk; i < end; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace zener
