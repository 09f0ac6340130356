#pragma once

#include <cstddef>
#include <functional>

namespace andersonlab {

// Worker count: ANDERSONLAB_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() workers. Results must be
// written to per-index slots; the first exception is rethrown after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace andersonlab
