#pragma once

#include <cstddef>
#include <functional>

namespace thermoform {

// Worker count: THERMOFORM_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Iterations are distributed over worker
// threads; callers store results by index, so assembly order never depends
// on scheduling. Nested calls from inside a worker run serially. The first
// exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace thermoform
