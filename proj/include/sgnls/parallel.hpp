#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace sgnls {

// Runs body(i) for i in [0, n). Each index is owned by exactly one worker, so
// results written per index do not depend on the thread count. The exception
// of the lowest failing index is rethrown.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = threads < n ? threads : n;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) {
          try {
            body(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sgnls
