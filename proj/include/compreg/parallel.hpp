#pragma once

#include <cstddef>
#include <functional>

namespace compreg {

/// Caps internal parallelism (CLI --threads). 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn(begin, end) over a fixed contiguous partition of [0, n).
/// Chunks only ever write disjoint outputs, so results are deterministic
/// for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace compreg
