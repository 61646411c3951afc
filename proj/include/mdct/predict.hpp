#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mdct/grid.hpp"
#include "mdct/rng.hpp"
#include "mdct/sampler.hpp"

namespace mdct {

/// Composition-sampling draws at one location: for every stored parameter
/// draw, w = sum of kernel-weighted betas under that draw's eta, and
/// y ~ N(x0'gamma + w, sigma2).
struct PredictionDraws {
  std::vector<double> y;
  std::vector<double> w;
  double p_mean = 0.0;  // probit: average of Phi(linear predictor)

  double y_mean() const;
  double w_mean() const;
};

struct PredictionSummary {
  double y_mean = 0, y_median = 0, y_lo95 = 0, y_hi95 = 0;
  double w_mean = 0, w_median = 0, w_lo95 = 0, w_hi95 = 0;
  double p_mean = 0;
};

PredictionSummary summarize(const PredictionDraws& draws);

/// Sample quantile with linear interpolation; draws are copied and sorted.
double quantile(std::vector<double> values, double prob);

PredictionDraws predict_at(const Point& s0, const Eigen::VectorXd& x0,
                           const ChainSamples& chain, const MultiresGrid& grid, Rng& rng);

std::vector<PredictionDraws> predict_points(const std::vector<Point>& points,
                                            const Eigen::MatrixXd& X0,
                                            const ChainSamples& chain,
                                            const MultiresGrid& grid, std::uint64_t seed,
                                            int workers = 1);

/// Posterior draws of the residual process w(s) (no observation noise).
std::vector<std::vector<double>> residual_surface(const std::vector<Point>& points,
                                                  const ChainSamples& chain,
                                                  const MultiresGrid& grid, int workers = 1);

double mse(const std::vector<double>& estimate, const std::vector<double>& truth);

struct PredictiveMetrics {
  double mspe = 0.0;
  double coverage95 = 0.0;
  double mean_length95 = 0.0;
};

PredictiveMetrics predictive_metrics(const std::vector<PredictionDraws>& draws,
                                     const std::vector<double>& truth);

}  // namespace mdct
