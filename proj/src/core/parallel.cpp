#include "cmrf/core/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cmrf {

void
parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads)
{
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k)
      body(k);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace cmrf
