#pragma once

#include <cstddef>
#include <cstdint>

namespace spininterp {

/// Kernel execution policy. `serial` runs the reference loop, `parallel`
/// runs the OpenMP kernel. Parallel kernels partition work into a fixed
/// number of chunks that does not depend on the thread count, so results
/// are reproducible for any worker cap.
enum class Exec { serial, parallel };

/// Caps the OpenMP worker count (0 leaves the runtime default).
void set_thread_cap(int threads);
int thread_cap();

/// Reads SPININTERP_THREADS; returns 0 when unset or malformed.
int threads_from_environment();

/// Fixed chunking used by every parallel reduction.
struct ChunkRange {
  std::uint64_t begin;
  std::uint64_t end;
};

inline ChunkRange chunk_range(std::uint64_t total, std::uint64_t chunks, std::uint64_t index) {
  const std::uint64_t base = total / chunks;
  const std::uint64_t extra = total % chunks;
  const std::uint64_t begin = index * base + (index < extra ? index : extra);
  return {begin, begin + base + (index < extra ? 1 : 0)};
}

}  // namespace spininterp
