#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdct/errors.hpp"
#include "mdct/predict.hpp"
#include "mdct/rng.hpp"
#include "mdct/simdata.hpp"
#include "test_util.hpp"

using namespace mdct;
using mdct_test::grid_1d;

namespace {

/// Hand-built chain with given draws over a 1d grid.
ChainSamples tiny_chain(const MultiresGrid& g, long stored, double gamma0, double sigma2,
                        const std::vector<double>& beta_template) {
  ChainSamples chain;
  chain.family = "gaussian";
  chain.grid_spec = GridSpec{g.box, g.R, g.J1};
  chain.hyper = Hyperparams{};
  chain.n_iter = stored;
  chain.burn_in = 0;
  chain.thin = 1;
  chain.p = 1;
  chain.n_basis = g.total_nodes;
  chain.n_delta = g.total_nodes - g.J_at(1);
  for (long l = 0; l < stored; ++l) {
    chain.gamma_draws.push_back(gamma0);
    chain.sigma2_draws.push_back(sigma2);
    chain.beta_draws.insert(chain.beta_draws.end(), beta_template.begin(),
                            beta_template.end());
    chain.delta1_draws.push_back(2.0);
    for (long d = 0; d < chain.n_delta; ++d) chain.delta_draws.push_back(3.0);
    chain.eta_draws.push_back(1);
  }
  return chain;
}

}  // namespace

TEST_CASE("quantile interpolates order statistics") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK_THROWS_AS(quantile({}, 0.5), numeric_error);
}

TEST_CASE("single-draw intercept-only chain predicts N(gamma0, sigma2)") {
  const MultiresGrid g = grid_1d(4, 1);
  const std::vector<double> beta(static_cast<std::size_t>(g.total_nodes), 0.0);
  const ChainSamples chain = tiny_chain(g, 1, 2.5, 0.49, beta);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  std::vector<double> samples;
  for (int k = 0; k < 40000; ++k) {
    Rng rng(stream_key(9, Phase::predict, 0, static_cast<std::uint64_t>(k)));
    const PredictionDraws draws = predict_at(Point{3.3, 0.0}, x0, chain, g, rng);
    REQUIRE(draws.y.size() == 1);
    CHECK(draws.w[0] == 0.0);
    samples.push_back(draws.y[0]);
  }
  CHECK(mdct_test::mean_of(samples) == doctest::Approx(2.5).epsilon(0.005));
  CHECK(mdct_test::variance_of(samples) == doctest::Approx(0.49).epsilon(0.05));
}

TEST_CASE("residual surface is exactly zero where no kernel reaches") {
  const MultiresGrid g = grid_1d(10, 1);  // knots at 0.5,1.5,...; phi_1 = 1 for eta=1
  std::vector<double> beta(static_cast<std::size_t>(g.total_nodes), 0.0);
  beta[0] = 3.0;  // only the knot at 0.5 carries signal
  const ChainSamples chain = tiny_chain(g, 5, 0.0, 1.0, beta);
  const auto far = residual_surface({Point{9.5, 0.0}}, chain, g);
  for (double w : far[0]) CHECK(w == 0.0);
  const auto near = residual_surface({Point{0.5, 0.0}}, chain, g);
  for (double w : near[0]) CHECK(w == doctest::Approx(3.0));
}

TEST_CASE("beta=0 draws give identically zero residual surface") {
  const MultiresGrid g = grid_1d(5, 2);
  const std::vector<double> beta(static_cast<std::size_t>(g.total_nodes), 0.0);
  const ChainSamples chain = tiny_chain(g, 7, 1.0, 1.0, beta);
  const auto w = residual_surface({Point{1.0, 0.0}, Point{7.7, 0.0}}, chain, g);
  for (const auto& point_draws : w) {
    for (double v : point_draws) CHECK(v == 0.0);
  }
}

TEST_CASE("predictive noise is zero-mean: mean(y) matches mean(mu)") {
  const MultiresGrid g = grid_1d(6, 2);
  Rng rng(15);
  std::vector<double> beta(static_cast<std::size_t>(g.total_nodes));
  for (double& b : beta) b = rng.normal();
  const ChainSamples chain = tiny_chain(g, 4000, 0.7, 0.25, beta);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  const Point s0{4.2, 0.0};
  Rng prng(stream_key(77, Phase::predict, 0, 0));
  const PredictionDraws draws = predict_at(s0, x0, chain, g, prng);
  // All draws share one parameter draw, so mu is constant; the Monte Carlo
  // average of y converges to it.
  const double mu = draws.w[0] + 0.7;
  CHECK(mdct_test::mean_of(draws.y) == doctest::Approx(mu).epsilon(0.01));
}

TEST_CASE("mse examples and oracle") {
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(mse(a, a) == 0.0);
  std::vector<double> b{2.0, 3.0, 4.0};
  CHECK(mse(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mse(a, std::vector<double>{1.0}), data_error);

  Rng rng(21);
  std::vector<double> est(500), truth(500);
  for (std::size_t i = 0; i < 500; ++i) {
    est[i] = rng.normal();
    truth[i] = rng.normal();
  }
  double direct = 0.0;
  for (std::size_t i = 0; i < 500; ++i) direct += (est[i] - truth[i]) * (est[i] - truth[i]);
  direct /= 500.0;
  CHECK(mse(est, truth) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("predictive metrics on degenerate draw sets") {
  PredictionDraws all_cover;
  all_cover.y = {0.0, 5.0, 10.0};
  all_cover.w = {0.0, 0.0, 0.0};
  PredictionDraws exact;
  exact.y = {2.0, 2.0, 2.0};
  exact.w = {0.0, 0.0, 0.0};

  const std::vector<PredictionDraws> draws{all_cover, exact};
  const std::vector<double> truth{5.0, 2.0};
  const PredictiveMetrics m = predictive_metrics(draws, truth);
  CHECK(m.coverage95 == doctest::Approx(1.0));
  // Second point: all draws equal the truth, zero-width interval.
  const PredictiveMetrics m2 = predictive_metrics({exact}, {2.0});
  CHECK(m2.mspe == 0.0);
  CHECK(m2.mean_length95 == 0.0);
  CHECK(m2.coverage95 == 1.0);
}

TEST_CASE("summaries are consistent with stored draws") {
  PredictionDraws d;
  Rng rng(33);
  for (int k = 0; k < 999; ++k) {
    d.y.push_back(rng.normal());
    d.w.push_back(rng.normal());
  }
  const PredictionSummary s = summarize(d);
  CHECK(s.y_lo95 <= s.y_median);
  CHECK(s.y_median <= s.y_hi95);
  CHECK(s.w_lo95 <= s.w_median);
  CHECK(s.w_median <= s.w_hi95);
  CHECK(s.y_mean == doctest::Approx(mdct_test::mean_of(d.y)));
}

TEST_CASE("out-of-domain prediction points are rejected") {
  const MultiresGrid g = grid_1d(4, 1);
  const std::vector<double> beta(static_cast<std::size_t>(g.total_nodes), 0.0);
  const ChainSamples chain = tiny_chain(g, 2, 0.0, 1.0, beta);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  Rng rng(1);
  CHECK_THROWS_AS(predict_at(Point{-0.5, 0.0}, x0, chain, g, rng), data_error);
}

TEST_CASE("tree shrinkage beats the flat-prior baseline on the 1d surface") {
  // Desk-scale version of the 1d experiment; both samplers share the basis.
  const SimulatedData sim = gen_1d(1200, 0.15, Eigen::Vector2d(1.0, 1.0), 404);
  const MultiresGrid g = grid_1d(20, 3);
  Hyperparams hyper;
  ChainConfig cfg;
  cfg.n_iter = 1600;
  cfg.burn_in = 600;
  cfg.thin = 2;
  cfg.seed = 99;
  cfg.mode = Mode::chromatic;
  cfg.workers = 2;

  const ChainSamples tree_chain = run_chain(sim.data, g, hyper, cfg);

  GibbsSampler flat(sim.data, g, hyper, cfg);
  flat.set_flat_prior(1.0);
  const ChainSamples flat_chain = run_prepared_chain(flat, g, hyper, cfg, 2, "gaussian");

  auto surface_mse = [&](const ChainSamples& chain) {
    const auto draws = residual_surface(sim.data.locations, chain, g, 2);
    std::vector<double> med(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) med[i] = quantile(draws[i], 0.5);
    return mse(med, sim.w0);
  };
  const double tree_mse = surface_mse(tree_chain);
  const double flat_mse = surface_mse(flat_chain);
  MESSAGE("tree prior MSE = ", tree_mse, ", flat prior MSE = ", flat_mse);
  CHECK(tree_mse < flat_mse);
}

TEST_CASE("noiseless 1d run recovers the surface to MSE below 1e-2") {
  const SimulatedData sim = gen_1d(2000, 0.0, Eigen::Vector2d(1.0, 1.0), 505);
  const MultiresGrid g = grid_1d(30, 3);
  Hyperparams hyper;
  ChainConfig cfg;
  cfg.n_iter = 2200;
  cfg.burn_in = 1200;
  cfg.thin = 2;
  cfg.seed = 7;
  cfg.mode = Mode::chromatic;
  cfg.workers = 2;
  const ChainSamples chain = run_chain(sim.data, g, hyper, cfg);
  const auto draws = residual_surface(sim.data.locations, chain, g, 2);
  std::vector<double> med(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) med[i] = quantile(draws[i], 0.5);
  const double err = mse(med, sim.w0);
  MESSAGE("noiseless recovery MSE = ", err);
  CHECK(err <= 1e-2);
}
