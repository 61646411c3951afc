#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mdct/grid.hpp"
#include "mdct/sampler.hpp"

namespace mdct {

struct BinaryDataset {
  std::vector<int> y;  // entries in {0,1}
  Eigen::MatrixXd X;
  std::vector<Point> locations;
  int dim = 1;

  long n() const { return static_cast<long>(y.size()); }
};

/// Latent probit responses: z_i ~ N(linear predictor, 1) truncated to
/// (0, inf) when y_i = 1 and to (-inf, 0] when y_i = 0.
void update_latents(const BinaryDataset& data, const Eigen::VectorXd& lin_pred,
                    Eigen::VectorXd& z, std::uint64_t seed, long iter, int workers = 1);

/// Gaussian-model Gibbs run on the latent responses with sigma^2 pinned at 1.
ChainSamples run_probit_chain(const BinaryDataset& data, const MultiresGrid& grid,
                              const Hyperparams& hyper, const ChainConfig& cfg);

/// Mann-Whitney AUC; ties contribute 1/2. Throws on single-class labels.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace mdct
