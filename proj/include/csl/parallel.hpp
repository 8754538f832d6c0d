#pragma once

#include <cstddef>
#include <functional>

namespace csl {

// Worker cap: CSL_THREADS if set and positive, else hardware concurrency.
std::size_t thread_cap();

// Runs body(i) for i in [0, n) on up to thread_cap() threads. Callers must write
// results into pre-sized per-index slots so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace csl
