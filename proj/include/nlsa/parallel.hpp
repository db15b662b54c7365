#pragma once

#include <functional>

namespace nlsa {

/// Worker count from an explicit request, else NLSA_LAB_THREADS, else 1.
int resolve_threads(int requested);

/// Calls fn(i) for i in [0, n); indices are handed out dynamically.  The
/// first exception thrown by any call is rethrown after all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace nlsa
