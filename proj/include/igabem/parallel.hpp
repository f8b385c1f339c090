#pragma once

#include <functional>

namespace igabem {

/// Hardware concurrency, at least 1.
int default_threads();

/// Runs f(i) for i in [0, n) on up to `threads` workers with static contiguous blocks.
/// Each index is processed by exactly one worker, so results written per index are
/// independent of the thread count. The first exception thrown is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace igabem
