#include "mdct/bench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdct/errors.hpp"
#include "mdct/simdata.hpp"

namespace mdct {

namespace {

double mean_after_warmup(const std::vector<double>& iter_seconds, long warmup) {
  if (static_cast<long>(iter_seconds.size()) <= warmup) {
    throw config_error("bench needs more iterations than warmup");
  }
  double acc = 0.0;
  long count = 0;
  for (std::size_t t = static_cast<std::size_t>(warmup); t < iter_seconds.size(); ++t) {
    acc += iter_seconds[t];
    ++count;
  }
  return acc / static_cast<double>(count);
}

}  // namespace

BenchResult run_bench(const std::vector<long>& sizes, int R, std::array<int, 2> J1,
                      int h_eta, long warmup, long iters, int workers, std::uint64_t seed) {
  if (sizes.empty()) throw config_error("bench needs at least one data size");
  BenchResult result;
  result.workers = workers;

  DomainBox box;
  box.dim = 2;
  box.lo = {0.0, 0.0};
  box.hi = {1.0, 1.0};
  const MultiresGrid grid = build_grid(box, R, J1);
  Hyperparams hyper;
  hyper.h_eta = h_eta;

  for (long n : sizes) {
    const SimulatedData sim = gen_bench(n, seed);
    BenchPoint point;
    point.n = n;

    ChainConfig cfg;
    cfg.n_iter = warmup + iters;
    cfg.burn_in = warmup + iters;  // timing run; no draws stored
    cfg.thin = 1;
    cfg.seed = seed;

    cfg.mode = Mode::sequential;
    cfg.workers = 1;
    point.seq_iter_s = mean_after_warmup(
        run_chain(sim.data, grid, hyper, cfg).iter_seconds, warmup);

    cfg.mode = Mode::chromatic;
    cfg.workers = workers;
    point.par_iter_s = mean_after_warmup(
        run_chain(sim.data, grid, hyper, cfg).iter_seconds, warmup);

    result.points.push_back(point);
  }

  double tn = 0.0, nn = 0.0;
  for (const BenchPoint& p : result.points) {
    tn += p.seq_iter_s * static_cast<double>(p.n);
    nn += static_cast<double>(p.n) * static_cast<double>(p.n);
  }
  result.slope = tn / nn;
  for (const BenchPoint& p : result.points) {
    const double fitted = result.slope * static_cast<double>(p.n);
    result.max_rel_residual =
        std::max(result.max_rel_residual, std::fabs(p.seq_iter_s - fitted) / fitted);
  }
  const BenchPoint& last = result.points.back();
  result.speedup_largest_n = last.seq_iter_s / last.par_iter_s;
  return result;
}

std::string bench_report(const BenchResult& result) {
  std::ostringstream out;
  out << "n,seq_iter_s,chromatic_iter_s\n";
  for (const BenchPoint& p : result.points) {
    out << p.n << ',' << p.seq_iter_s << ',' << p.par_iter_s << "\n";
  }
  out << "origin_fit_slope_s_per_obs " << result.slope << "\n";
  out << "max_relative_residual " << result.max_rel_residual << "\n";
  out << "chromatic_workers " << result.workers << "\n";
  out << "speedup_at_largest_n " << result.speedup_largest_n << "\n";
  return out.str();
}

}  // namespace mdct
