#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdct/sampler.hpp"

namespace mdct {

struct BenchPoint {
  long n = 0;
  double seq_iter_s = 0.0;   // mean per-iteration wall time, sequential, 1 worker
  double par_iter_s = 0.0;   // mean per-iteration wall time, chromatic, `workers` workers
};

struct BenchResult {
  std::vector<BenchPoint> points;
  int workers = 1;
  double slope = 0.0;              // least-squares fit seq_iter_s ~ slope * n through origin
  double max_rel_residual = 0.0;   // max |t - slope n| / (slope n) over the sweep
  double speedup_largest_n = 0.0;  // seq/par at the largest n
};

/// Times the sampler at fixed grid over a sweep of data sizes. Uses the cheap
/// synthetic generator (no dense factorization), so arbitrarily large n is fine.
BenchResult run_bench(const std::vector<long>& sizes, int R, std::array<int, 2> J1,
                      int h_eta, long warmup, long iters, int workers, std::uint64_t seed);

std::string bench_report(const BenchResult& result);

}  // namespace mdct
