#include "mdct/predict.hpp"

#include <algorithm>
#include <cmath>

#include "mdct/errors.hpp"
#include "mdct/kernel.hpp"
#include "mdct/parallel.hpp"

namespace mdct {

namespace {

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

double PredictionDraws::y_mean() const { return mean_of(y); }
double PredictionDraws::w_mean() const { return mean_of(w); }

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw numeric_error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - std::floor(h);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PredictionSummary summarize(const PredictionDraws& draws) {
  PredictionSummary s;
  s.y_mean = draws.y_mean();
  s.w_mean = draws.w_mean();
  s.y_median = quantile(draws.y, 0.5);
  s.y_lo95 = quantile(draws.y, 0.025);
  s.y_hi95 = quantile(draws.y, 0.975);
  s.w_median = quantile(draws.w, 0.5);
  s.w_lo95 = quantile(draws.w, 0.025);
  s.w_hi95 = quantile(draws.w, 0.975);
  s.p_mean = draws.p_mean;
  return s;
}

namespace {

struct RowCache {
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows;  // per eta candidate
  std::vector<char> built;

  const std::vector<std::pair<std::int32_t, double>>& get(const Point& s,
                                                          const MultiresGrid& grid, int eta) {
    auto& slot = rows[static_cast<std::size_t>(eta - 1)];
    if (!built[static_cast<std::size_t>(eta - 1)]) {
      slot = design_row(s, grid, static_cast<double>(eta));
      built[static_cast<std::size_t>(eta - 1)] = 1;
    }
    return slot;
  }
};

}  // namespace

PredictionDraws predict_at(const Point& s0, const Eigen::VectorXd& x0,
                           const ChainSamples& chain, const MultiresGrid& grid, Rng& rng) {
  if (!grid.box.contains(s0)) throw data_error("prediction location outside the domain box");
  if (x0.size() != chain.p) throw data_error("predictor vector length mismatch");
  const long L = chain.stored();
  PredictionDraws out;
  out.y.resize(static_cast<std::size_t>(L));
  out.w.resize(static_cast<std::size_t>(L));

  RowCache cache;
  cache.rows.resize(static_cast<std::size_t>(chain.hyper.h_eta));
  cache.built.assign(static_cast<std::size_t>(chain.hyper.h_eta), 0);

  double p_acc = 0.0;
  for (long l = 0; l < L; ++l) {
    const int eta = chain.eta_draws[static_cast<std::size_t>(l)];
    const auto& row = cache.get(s0, grid, eta);
    const double* beta = chain.beta_draws.data() + l * chain.n_basis;
    double w = 0.0;
    for (const auto& [c, v] : row) w += v * beta[c];
    const double* gamma = chain.gamma_draws.data() + l * chain.p;
    double mu = w;
    for (int k = 0; k < chain.p; ++k) mu += gamma[k] * x0[k];
    const double sigma = std::sqrt(chain.sigma2_draws[static_cast<std::size_t>(l)]);
    out.w[static_cast<std::size_t>(l)] = w;
    out.y[static_cast<std::size_t>(l)] = mu + sigma * rng.normal();
    p_acc += normal_cdf(mu);
  }
  out.p_mean = L > 0 ? p_acc / static_cast<double>(L) : 0.0;
  return out;
}

std::vector<PredictionDraws> predict_points(const std::vector<Point>& points,
                                            const Eigen::MatrixXd& X0,
                                            const ChainSamples& chain,
                                            const MultiresGrid& grid, std::uint64_t seed,
                                            int workers) {
  if (X0.rows() != static_cast<long>(points.size())) {
    throw data_error("prediction points and predictors have different lengths");
  }
  std::vector<PredictionDraws> out(points.size());
  parallel_items(static_cast<std::int64_t>(points.size()), workers, [&](std::int64_t i) {
    Rng rng(stream_key(seed, Phase::predict, 0, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] =
        predict_at(points[static_cast<std::size_t>(i)], X0.row(i).transpose(), chain, grid, rng);
  });
  return out;
}

std::vector<std::vector<double>> residual_surface(const std::vector<Point>& points,
                                                  const ChainSamples& chain,
                                                  const MultiresGrid& grid, int workers) {
  const long L = chain.stored();
  std::vector<std::vector<double>> out(points.size());
  parallel_items(static_cast<std::int64_t>(points.size()), workers, [&](std::int64_t i) {
    if (!grid.box.contains(points[static_cast<std::size_t>(i)])) {
      throw data_error("surface location outside the domain box");
    }
    RowCache cache;
    cache.rows.resize(static_cast<std::size_t>(chain.hyper.h_eta));
    cache.built.assign(static_cast<std::size_t>(chain.hyper.h_eta), 0);
    auto& draws = out[static_cast<std::size_t>(i)];
    draws.resize(static_cast<std::size_t>(L));
    for (long l = 0; l < L; ++l) {
      const int eta = chain.eta_draws[static_cast<std::size_t>(l)];
      const auto& row = cache.get(points[static_cast<std::size_t>(i)], grid, eta);
      const double* beta = chain.beta_draws.data() + l * chain.n_basis;
      double w = 0.0;
      for (const auto& [c, v] : row) w += v * beta[c];
      draws[static_cast<std::size_t>(l)] = w;
    }
  });
  return out;
}

double mse(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) throw data_error("mse length mismatch");
  if (estimate.empty()) throw data_error("mse of empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(estimate.size());
}

PredictiveMetrics predictive_metrics(const std::vector<PredictionDraws>& draws,
                                     const std::vector<double>& truth) {
  if (draws.size() != truth.size()) throw data_error("metrics length mismatch");
  if (draws.empty()) throw data_error("metrics of empty prediction set");
  PredictiveMetrics m;
  double covered = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double mean = draws[i].y_mean();
    const double d = mean - truth[i];
    m.mspe += d * d;
    const double lo = quantile(draws[i].y, 0.025);
    const double hi = quantile(draws[i].y, 0.975);
    if (truth[i] >= lo && truth[i] <= hi) covered += 1.0;
    m.mean_length95 += hi - lo;
  }
  const double n = static_cast<double>(draws.size());
  m.mspe /= n;
  m.coverage95 = covered / n;
  m.mean_length95 /= n;
  return m;
}

}  // namespace mdct
