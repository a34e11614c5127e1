#pragma once

#include <cstddef>
#include <functional>

namespace jtrace {

/// Worker count: hardware concurrency, capped by JSPEC_THREADS when set.
std::size_t thread_budget();

/// Runs body(i) for i in [0, count).  Each index is handled by exactly one
/// worker, so results written to slot i are deterministic.  The exception
/// thrown at the lowest failing index is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace jtrace
