#pragma once

#include <cstdint>
#include <functional>

namespace trio {

/// Number of worker threads for per-channel loops. Capped by the
/// TRIO_THREADS environment variable when set; at least 1.
int thread_budget();

/// Runs fn(i) for i in [0, n). Work items must touch disjoint state; results
/// are bitwise independent of the schedule.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace trio
