#pragma once

#include <cstddef>
#include <functional>

namespace qtomo {

/// Number of worker threads to use: QTOMO_THREADS when set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Splits [0, n) into contiguous chunks and calls body(begin, end) for each,
/// possibly on several threads. Chunk boundaries depend only on n and the
/// worker count, so callers that write to disjoint output slots get results
/// independent of scheduling.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t min_chunk = 1);

}  // namespace qtomo
