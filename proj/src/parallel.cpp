#include "qmsr/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qmsr {

std::size_t thread_cap() {
  static const std::size_t cap = [] {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const char* env = std::getenv("QMSR_THREADS");
    if (env == nullptr) return hw;
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end == env || parsed < 0) return hw;
    return parsed == 0 ? hw : static_cast<std::size_t>(parsed);
  }();
  return cap;
}

void parallel_for(Index begin, Index end, const std::function<void(Index)>& fn) {
  const Index span = end - begin;
  if (span <= 0) return;

  const std::size_t workers =
      std::min<std::size_t>(thread_cap(), static_cast<std::size_t>(span));
  if (workers <= 1) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);

  // Static contiguous blocks; each index writes only its own outputs, so the
  // partition cannot change results.
  const Index chunk = (span + static_cast<Index>(workers) - 1) / static_cast<Index>(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const Index lo = begin + static_cast<Index>(w) * chunk;
    const Index hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qmsr
