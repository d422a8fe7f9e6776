#pragma once

#include <cstddef>
#include <functional>

namespace ubic {

/// Worker count from the UBIC_NUM_THREADS environment variable (default 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over thread_count() workers. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome does not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ubic
