#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace photon_src {

/// Runs body(j) for j in [0, n) on up to `threads` workers, strided so each
/// index always lands in its own slot. The exception from the lowest failing
/// index is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t first) {
    for (std::size_t j = first; j < n; j += threads) {
      try {
        body(j);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace photon_src
