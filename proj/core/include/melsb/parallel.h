#ifndef MELSB_PARALLEL_H_
#define MELSB_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace melsb {

// Process-wide worker count used by ParallelFor. Defaults to 1.
void SetNumThreads(int num_threads);
int NumThreads();

// Splits [0, n) into contiguous chunks, one per worker, and calls
// fn(begin, end) for each. Chunk boundaries depend only on n and the thread
// count, and every index is visited exactly once, so callers that write
// disjoint outputs per index get results independent of scheduling.
void ParallelFor(size_t n, const std::function<void(size_t, size_t)>& fn);

}  // namespace melsb

#endif  // MELSB_PARALLEL_H_
