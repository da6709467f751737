#include "resalloc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace resalloc {

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_chunk(std::size_t jobs, unsigned threads, const ChunkFn& fn) {
  const std::size_t chunks = chunk_count(jobs);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), chunks));
  auto bounds = [jobs](std::size_t c) {
    const std::size_t begin = c * kJobChunk;
    return std::pair{begin, std::min(jobs, begin + kJobChunk)};
  };

  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [begin, end] = bounds(c);
      fn(c, begin, end);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  // Chunks are claimed in index order and in-flight chunks always finish, so
  // keeping the lowest failing chunk makes the reported error deterministic.
  std::exception_ptr failure;
  std::size_t failed_chunk = chunks;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      try {
        auto [begin, end] = bounds(c);
        fn(c, begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (c < failed_chunk) {
          failed_chunk = c;
          failure = std::current_exception();
        }
        next.store(chunks);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace resalloc
