#pragma once

#include <cstdint>
#include <functional>

namespace qhot {

// Worker count taken from the QHOT_WORKERS environment variable, falling back
// to the hardware concurrency. Always >= 1.
int worker_count();

// Runs fn(begin, end, chunk_index) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk_size, never on the worker
// count, so per-chunk results (and any reduction done in chunk order) are
// reproducible for any number of workers. The first exception thrown by a
// chunk is rethrown on the calling thread.
void parallel_chunks(std::int64_t n, std::int64_t chunk_size,
                     const std::function<void(std::int64_t, std::int64_t,
                                              std::size_t)>& fn);

// Number of chunks parallel_chunks will use for the same arguments.
std::size_t chunk_count(std::int64_t n, std::int64_t chunk_size);

inline constexpr std::int64_t kDefaultChunk = 4096;

}  // namespace qhot
