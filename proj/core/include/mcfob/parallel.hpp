#pragma once

#include <cstddef>
#include <functional>

namespace mcfob {

/// Number of workers used for stencil sweeps. Initialised from the
/// MCFOB_THREADS environment variable, falling back to the hardware
/// concurrency.
std::size_t worker_count();

/// Overrides the worker count for the rest of the process (0 restores the
/// environment default).
void set_worker_count(std::size_t workers);

/// Splits [0, count) into contiguous chunks and calls body(begin, end) for
/// each, possibly concurrently. Returns after every chunk is done. Callers
/// must write disjoint outputs per index.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mcfob
