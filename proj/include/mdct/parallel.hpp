#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdct {

inline int effective_workers(int requested) { return requested < 1 ? 1 : requested; }

inline int max_hardware_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Fixed chunk grid: depends on n only, never on the worker count, so that
// chunked reductions combine partials in an order that is reproducible
// across schedules.
inline std::int64_t chunk_size_for(std::int64_t n) {
  constexpr std::int64_t kChunk = 4096;
  return n < kChunk ? (n > 0 ? n : 1) : kChunk;
}

/// f(begin, end, chunk_index) over [0,n) split into fixed chunks.
template <class F>
void for_chunks(std::int64_t n, int workers, F&& f) {
  if (n <= 0) return;
  const std::int64_t chunk = chunk_size_for(n);
  const std::int64_t n_chunks = (n + chunk - 1) / chunk;
  workers = effective_workers(workers);
#ifdef _OPENMP
  if (workers > 1 && n_chunks > 1) {
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      const std::int64_t b = c * chunk;
      f(b, std::min(n, b + chunk), c);
    }
    return;
  }
#endif
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    const std::int64_t b = c * chunk;
    f(b, std::min(n, b + chunk), c);
  }
}

/// Deterministic sum reduction: g(begin, end) -> partial, partials combined
/// in chunk order regardless of the worker count.
template <class G>
double reduce_chunks(std::int64_t n, int workers, G&& g) {
  if (n <= 0) return 0.0;
  const std::int64_t chunk = chunk_size_for(n);
  const std::int64_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(n_chunks));
  for_chunks(n, workers, [&](std::int64_t b, std::int64_t e, std::int64_t c) {
    partial[static_cast<std::size_t>(c)] = g(b, e);
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

/// Parallel loop over independent work items (no reduction, disjoint writes).
template <class F>
void parallel_items(std::int64_t n, int workers, F&& f) {
  if (n <= 0) return;
  workers = effective_workers(workers);
#ifdef _OPENMP
  if (workers > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

inline int current_thread_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace mdct
