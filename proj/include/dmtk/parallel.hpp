#pragma once

#include <cstdint>
#include <functional>

namespace dmtk {

/// Default worker count: DMTK_THREADS env var if set, else hardware
/// concurrency, never less than 1.
int default_threads();

struct BlockRange {
    std::int64_t begin = 0;
    std::int64_t end = 0;
    std::int64_t size() const { return end - begin; }
    bool empty() const { return begin >= end; }
};

/// Balanced contiguous split: the first (total % threads) workers get
/// ceil(total/threads) items, the rest get floor(total/threads).
BlockRange balanced_block(std::int64_t total, int threads, int t);

/// Fixed-width split with width ceil(total/threads); trailing workers may be
/// short or empty.
BlockRange ceil_chunk(std::int64_t total, int threads, int t);

/// Run body(t) for t in [0, threads): threads-1 std::threads plus the
/// calling thread for t = 0, joined before returning. threads == 1 is a
/// plain call. body must not throw.
void run_on_threads(int threads, const std::function<void(int)>& body);

}  // namespace dmtk
