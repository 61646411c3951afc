#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mdct/grid.hpp"
#include "mdct/probit.hpp"
#include "mdct/sampler.hpp"

namespace mdct {

struct MaternParams {
  double theta1 = 1.0;  // marginal variance scale
  double theta2 = 3.0;  // spatial decay, > 0
  double nu = 0.5;      // smoothness, > 0
};

/// Piecewise 1D test surface on [0,10]:
///   sin(2 pi s) s   on [0,2),  |sin(s-3)|^3 on [2,4),
///   5|s-5|          on [4,6),  sin(2 pi s) s on [6,10].
double w0_1d(double s);

/// theta1 / (2^{nu-1} Gamma(nu)) (d theta2)^nu K_nu(d theta2); theta1 at d=0.
double matern(double dist, const MaternParams& params);

struct SimulatedData {
  Dataset data;
  std::vector<double> w0;  // true residual surface at the data locations
};

struct BinarySimulatedData {
  BinaryDataset data;
  std::vector<double> w0;
};

struct TrainTest {
  SimulatedData train;
  SimulatedData test;
};

struct BinaryTrainTest {
  BinarySimulatedData train;
  BinarySimulatedData test;
};

/// Uniform locations on [0,10]; y = gamma0 + gamma1 x + w0_1d(s) + N(0, noise_sd^2),
/// with x drawn standard normal.
SimulatedData gen_1d(long n, double noise_sd, const Eigen::Vector2d& gamma,
                     std::uint64_t seed);

/// Uniform locations on [0,1]^2; w0 ~ N(0, Matern covariance) by dense
/// factorization; y = X gamma + w0 + eps with Var(eps) = theta1/noise_ratio.
/// Splits the n_total draws into a random train/test partition.
TrainTest gen_2d(long n_total, long n_test, const MaternParams& params, double noise_ratio,
                 const Eigen::Vector2d& gamma, std::uint64_t seed);

/// y_i ~ Bernoulli(Phi(x_i'gamma + w0(s_i))) over the gen_2d surface.
BinaryTrainTest gen_binary(long n_total, long n_test, const MaternParams& params,
                           const Eigen::Vector2d& gamma, std::uint64_t seed);

/// Cheap large-n generator for timing sweeps: deterministic smooth surface
/// plus noise, no O(n^3) factorization.
SimulatedData gen_bench(long n, std::uint64_t seed);

}  // namespace mdct
