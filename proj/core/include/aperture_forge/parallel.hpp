#pragma once

#include <cstddef>
#include <functional>

namespace apf {

// Worker count: APERTURE_FORGE_THREADS when set and positive, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Calls fn(i) for every i in [0, n), indices handed out one at a time;
// the first exception thrown by any worker is rethrown after all finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace apf
