#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace metasys {

/// Evaluates fn(first + k) for k in [0, count) on up to `threads` workers and
/// returns the results in index order. The first exception (by index) is
/// rethrown after all workers finish.
template <class R, class F>
std::vector<R> evaluate_batch(std::size_t first, std::size_t count, unsigned threads, F&& fn) {
  std::vector<R> results(count);
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) results[k] = fn(first + k);
    return results;
  }
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) {
        try {
          results[k] = fn(first + k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace metasys
