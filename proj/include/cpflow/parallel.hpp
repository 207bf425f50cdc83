#pragma once

#include <cstddef>
#include <functional>

namespace cpflow
{

/** Worker count: CPFLOW_THREADS if set to a positive integer, else hardware concurrency. */
std::size_t thread_budget();

/**
 * Run body(i) for i in [0, n) on up to thread_budget() threads. Each index is
 * handled exactly once; callers write results by index, so output order does
 * not depend on scheduling.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cpflow
