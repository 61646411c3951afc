#include "mdct/probit.hpp"

#include <algorithm>
#include <numeric>

#include "mdct/errors.hpp"
#include "mdct/parallel.hpp"
#include "mdct/rng.hpp"

namespace mdct {

void update_latents(const BinaryDataset& data, const Eigen::VectorXd& lin_pred,
                    Eigen::VectorXd& z, std::uint64_t seed, long iter, int workers) {
  const long n = data.n();
  if (lin_pred.size() != n) throw data_error("linear predictor length mismatch");
  z.resize(n);
  for_chunks(n, workers, [&](std::int64_t b, std::int64_t e, std::int64_t chunk) {
    Rng rng(stream_key(seed, Phase::latent, static_cast<std::uint64_t>(iter),
                       static_cast<std::uint64_t>(chunk)));
    for (std::int64_t i = b; i < e; ++i) {
      z[i] = rng.truncated_normal_unit_var(lin_pred[i], data.y[static_cast<std::size_t>(i)] == 1);
    }
  });
}

ChainSamples run_probit_chain(const BinaryDataset& data, const MultiresGrid& grid,
                              const Hyperparams& hyper, const ChainConfig& cfg) {
  cfg.validate();
  for (int v : data.y) {
    if (v != 0 && v != 1) throw data_error("probit responses must be 0 or 1");
  }
  Dataset latent;
  latent.X = data.X;
  latent.locations = data.locations;
  latent.dim = data.dim;
  latent.y.resize(data.n());
  for (long i = 0; i < data.n(); ++i) {
    latent.y[i] = data.y[static_cast<std::size_t>(i)] == 1 ? 0.5 : -0.5;
  }

  GibbsSampler sampler(latent, grid, hyper, cfg);
  sampler.fix_sigma2(1.0);
  sampler.set_binary_targets(data.y);
  return run_prepared_chain(sampler, grid, hyper, cfg, data.X.cols(), "probit");
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw data_error("auc length mismatch");
  const std::size_t n = scores.size();
  long n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw data_error("auc labels must be 0 or 1");
    n_pos += l;
  }
  const long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw data_error("auc undefined: labels contain a single class");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tied scores, then the Mann-Whitney rank-sum statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace mdct
