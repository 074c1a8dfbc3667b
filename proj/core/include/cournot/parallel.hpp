#pragma once

#include <cstddef>
#include <functional>

namespace cournot {

/// Worker cap from COURNOT_THREADS, falling back to hardware parallelism.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Callers
/// must make body(i) independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cournot
