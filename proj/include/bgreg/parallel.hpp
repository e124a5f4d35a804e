// Deterministic data-parallel helper. Work is split into contiguous chunks
// and each chunk writes disjoint outputs, so results do not depend on the
// thread count. Reductions stay sequential.

#pragma once

#include <cstddef>
#include <functional>

namespace bgreg {

void set_max_threads(int n);
int max_threads();

// Calls body(begin, end) over a partition of [0, n).
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)> &body);

}  // namespace bgreg
