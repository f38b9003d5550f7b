#pragma once

#include <cstddef>
#include <functional>

namespace spectramech {

/// Worker count: SPECTRAMECH_THREADS if set and positive, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(k) for k in [0, count). Each index is handled exactly once and
/// callers write into per-index slots, so results are identical for any
/// worker count. Nested calls run serially on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spectramech
