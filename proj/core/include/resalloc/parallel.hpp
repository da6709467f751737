#pragma once

#include <cstddef>
#include <functional>

namespace resalloc {

// Jobs are processed in fixed-size chunks. Chunk boundaries do not depend on
// the worker count, and every reduction combines per-chunk partials in chunk
// order, so results are bit-identical for any number of threads.
inline constexpr std::size_t kJobChunk = 4096;

inline std::size_t chunk_count(std::size_t jobs) {
  return (jobs + kJobChunk - 1) / kJobChunk;
}

using ChunkFn = std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>;

// Runs fn over every chunk of [0, jobs). threads == 0 means hardware concurrency.
void for_each_chunk(std::size_t jobs, unsigned threads, const ChunkFn& fn);

unsigned resolve_threads(unsigned requested);

}  // namespace resalloc
