#pragma once

#include <cstddef>
#include <functional>

namespace anosov {

/// Worker cap shared by all grid sweeps; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [begin, end) across the worker pool. Each index is
/// visited exactly once; the body must only write to slots owned by i.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace anosov
