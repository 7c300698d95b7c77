#include "cpf/parallel.hpp"

#include <algorithm>

namespace cpf {

namespace {
int g_threads = 0;
}

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t nchunks = (n + chunk - 1) / chunk;
#ifdef _OPENMP
  const int nt = threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    fn(begin, std::min(begin + chunk, n));
  }
#else
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t begin = c * chunk;
    fn(begin, std::min(begin + chunk, n));
  }
#endif
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  parallel_chunks(n, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

} // namespace cpf
