#pragma once

#include <cstddef>
#include <functional>

namespace bent {

/// Worker count: BENT_THREADS if set (>= 1), otherwise hardware concurrency.
int thread_count();

/// Runs body(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// Chunk boundaries depend only on n and chunk_size, never on the thread count.
void for_each_chunk(std::size_t n, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)> &body);

inline constexpr std::size_t kSampleChunk = 1 << 14;

}  // namespace bent
