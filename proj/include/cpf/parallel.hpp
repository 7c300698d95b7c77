#pragma once

#include <cstddef>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpf {

// Thread count used by all parallel kernels. 0 means "hardware default".
void set_threads(int n);
int threads();

// Runs fn(begin, end) over [0,n) split into fixed-size chunks. Chunk
// boundaries depend only on (n, chunk), never on the thread count, so any
// per-index output is bit-identical for 1 or many threads. State such as a
// warm start may be carried forward inside a chunk but not across chunks.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Convenience: one index per call, chunk size 1.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace cpf
