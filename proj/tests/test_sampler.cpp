#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "mdct/errors.hpp"
#include "mdct/kernel.hpp"
#include "mdct/sampler.hpp"
#include "test_util.hpp"

using namespace mdct;
using mdct_test::grid_1d;
using mdct_test::grid_2d;

namespace {

Dataset make_1d_data(long n, const MultiresGrid& grid, std::uint64_t seed,
                     double noise_sd = 0.3) {
  Rng rng(seed);
  Dataset data;
  data.dim = 1;
  data.locations.resize(static_cast<std::size_t>(n));
  data.X.resize(n, 2);
  data.y.resize(n);
  const double lo = grid.box.lo[0];
  const double hi = grid.box.hi[0];
  for (long i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * rng.uniform();
    data.locations[static_cast<std::size_t>(i)] = Point{s, 0.0};
    data.X(i, 0) = 1.0;
    data.X(i, 1) = rng.normal();
    data.y[i] = 0.5 + 0.3 * data.X(i, 1) + std::sin(s) + noise_sd * rng.normal();
  }
  return data;
}

Eigen::MatrixXd densify(const SparseDesign& ds) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(ds.n_rows, ds.n_cols);
  for (long i = 0; i < ds.n_rows; ++i) {
    for (auto k = ds.row_ptr[static_cast<std::size_t>(i)];
         k < ds.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      dense(i, ds.col[static_cast<std::size_t>(k)]) = ds.val[static_cast<std::size_t>(k)];
    }
  }
  return dense;
}

bool chains_identical(const ChainSamples& a, const ChainSamples& b) {
  return a.gamma_draws == b.gamma_draws && a.sigma2_draws == b.sigma2_draws &&
         a.beta_draws == b.beta_draws && a.delta1_draws == b.delta1_draws &&
         a.delta_draws == b.delta_draws && a.eta_draws == b.eta_draws;
}

}  // namespace

TEST_CASE("chain config validation and stored counts") {
  ChainConfig cfg;
  cfg.n_iter = 5;
  cfg.burn_in = 10;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.burn_in = 2;
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg.thin = 3;
  cfg.validate();
  CHECK(cfg.stored_count() == 1);
  cfg.n_iter = 12;
  CHECK(cfg.stored_count() == 4);  // ceil(10/3)
  cfg.n_iter = 2;
  CHECK(cfg.stored_count() == 0);
}

TEST_CASE("empty chain from n_iter=0") {
  const MultiresGrid g = grid_1d(3, 1);
  const Dataset data = make_1d_data(40, g, 1);
  ChainConfig cfg;
  cfg.n_iter = 0;
  cfg.burn_in = 0;
  Hyperparams hyper;
  hyper.h_eta = 1;
  const ChainSamples chain = run_chain(data, g, hyper, cfg);
  CHECK(chain.stored() == 0);
  CHECK(chain.beta_draws.empty());
}

TEST_CASE("dataset validation rejects rank-deficient predictors") {
  const MultiresGrid g = grid_1d(3, 1);
  Dataset data = make_1d_data(30, g, 2);
  data.X.col(1) = data.X.col(0);  // duplicate intercept
  CHECK_THROWS_AS(validate_dataset(data, g.box), data_error);
}

TEST_CASE("block dimension is the subtree size (P^R-1)/(P-1)") {
  const Dataset d1 = make_1d_data(30, grid_1d(2, 3), 3);
  GibbsSampler s1(d1, grid_1d(2, 3), Hyperparams{.h_eta = 1}, ChainConfig{.n_iter = 1});
  CHECK(s1.block_dim() == 7);

  Dataset d2;
  d2.dim = 2;
  Rng rng(4);
  d2.locations.resize(50);
  d2.X.resize(50, 1);
  d2.y.resize(50);
  for (long i = 0; i < 50; ++i) {
    d2.locations[static_cast<std::size_t>(i)] = Point{rng.uniform(), rng.uniform()};
    d2.X(i, 0) = 1.0;
    d2.y[i] = rng.normal();
  }
  GibbsSampler s2(d2, grid_2d(2, 2, 3), Hyperparams{.h_eta = 1}, ChainConfig{.n_iter = 1});
  CHECK(s2.block_dim() == 21);
}

TEST_CASE("q=1 block conditional equals the scalar formula") {
  const MultiresGrid g = grid_1d(6, 1);  // R=1 so every block is one knot
  const Dataset data = make_1d_data(80, g, 7);
  Hyperparams hyper;
  hyper.h_eta = 1;
  ChainConfig cfg;
  cfg.seed = 11;
  GibbsSampler sampler(data, g, hyper, cfg);
  for (long t = 1; t <= 3; ++t) sampler.iterate(t);  // move off the initial state

  const Eigen::MatrixXd K = densify(sampler.design(1));
  const Eigen::VectorXd resid_full =
      data.y - data.X * sampler.gamma() - K * sampler.beta();
  for (long m = 1; m <= g.J_at(1); ++m) {
    const GibbsSampler::BlockParams params = sampler.block_conditional(m);
    const long col = m - 1;
    const double ktk = K.col(col).squaredNorm();
    const double alpha = sampler.shrinkage().alpha[static_cast<std::size_t>(col)];
    const double sigma2 = sampler.sigma2();
    // y_{r,j}: residual with this block's own contribution added back.
    const Eigen::VectorXd y_rj = resid_full + K.col(col) * sampler.beta()[col];
    const double prec = 1.0 / alpha + ktk / sigma2;
    const double mean = (K.col(col).dot(y_rj) / sigma2) / prec;
    CHECK(params.precision(0, 0) == doctest::Approx(prec).epsilon(1e-12));
    CHECK(params.mean(0) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("blocks with no data rows draw from the prior") {
  const MultiresGrid g = grid_1d(8, 2);  // spacing 1.25 on [0,10]
  Rng rng(13);
  Dataset data;
  data.dim = 1;
  const long n = 60;
  data.locations.resize(static_cast<std::size_t>(n));
  data.X.resize(n, 1);
  data.y.resize(n);
  for (long i = 0; i < n; ++i) {
    data.locations[static_cast<std::size_t>(i)] = Point{2.0 * rng.uniform(), 0.0};  // [0,2] only
    data.X(i, 0) = 1.0;
    data.y[i] = rng.normal();
  }
  Hyperparams hyper;
  hyper.h_eta = 1;
  ChainConfig cfg;
  cfg.seed = 17;
  GibbsSampler sampler(data, g, hyper, cfg);

  const long far_block = 8;  // centered at 9.375, no data within eta*spacing
  CHECK(sampler.block_rows(1, far_block).empty());
  const auto params = sampler.block_conditional(far_block);
  CHECK(params.lin.cwiseAbs().maxCoeff() == 0.0);
  CHECK(params.mean.cwiseAbs().maxCoeff() == 0.0);

  sampler.update_beta_blocks(1);
  // Replicate the stream: with an empty data slice the draw is mean 0 with
  // covariance diag(alpha).
  Rng replay(stream_key(cfg.seed, Phase::beta, 1, static_cast<std::uint64_t>(far_block)));
  std::vector<long> cols;
  for (int r = 1; r <= g.R; ++r) {
    const long width = 1L << (r - 1);
    const long base = g.node_offset[static_cast<std::size_t>(r - 1)] + (far_block - 1) * width;
    for (long t = 0; t < width; ++t) cols.push_back(base + t);
  }
  for (long c : cols) {
    const double z = replay.normal();
    const double expected = std::sqrt(sampler.shrinkage().alpha[static_cast<std::size_t>(c)]) * z;
    CHECK(sampler.beta()[c] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("update_gamma conditional mean in limiting cases") {
  SUBCASE("orthonormal predictors with zero beta") {
    Dataset data;
    data.dim = 1;
    const long n = 6;
    data.X = Eigen::MatrixXd::Zero(n, 2);
    data.X(0, 0) = 1.0;
    data.X(1, 1) = 1.0;
    data.y.resize(n);
    data.y << 2.0, -1.5, 0.3, 0.3, 0.3, 0.3;
    data.locations.assign(static_cast<std::size_t>(n), Point{5.0, 0.0});
    const MultiresGrid g = grid_1d(2, 1);
    GibbsSampler sampler(data, g, Hyperparams{.h_eta = 1}, ChainConfig{.seed = 1});
    sampler.set_state(Eigen::Vector2d::Zero(), 1e-20, Eigen::VectorXd::Zero(g.total_nodes), 1);
    sampler.update_gamma(1);
    CHECK(sampler.gamma()[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(sampler.gamma()[1] == doctest::Approx(-1.5).epsilon(1e-8));
  }
  SUBCASE("intercept-only mean is the sample mean") {
    const MultiresGrid g = grid_1d(2, 1);
    Rng rng(3);
    Dataset data;
    data.dim = 1;
    const long n = 10;
    data.X = Eigen::MatrixXd::Ones(n, 1);
    data.y.resize(n);
    for (long i = 0; i < n; ++i) data.y[i] = rng.normal();
    data.locations.assign(static_cast<std::size_t>(n), Point{5.0, 0.0});
    GibbsSampler sampler(data, g, Hyperparams{.h_eta = 1}, ChainConfig{.seed = 2});
    sampler.set_state(Eigen::VectorXd::Zero(1), 1e-20, Eigen::VectorXd::Zero(g.total_nodes), 1);
    sampler.update_gamma(1);
    CHECK(sampler.gamma()[0] == doctest::Approx(data.y.mean()).epsilon(1e-8));
  }
  SUBCASE("noiseless responses concentrate on the generating gamma") {
    const MultiresGrid g = grid_1d(4, 2);
    Dataset data = make_1d_data(120, g, 5);
    Rng rng(9);
    Eigen::VectorXd beta(g.total_nodes);
    for (long c = 0; c < g.total_nodes; ++c) beta[c] = rng.normal();
    GibbsSampler sampler(data, g, Hyperparams{.h_eta = 1}, ChainConfig{.seed = 3});
    const Eigen::MatrixXd K = densify(sampler.design(1));
    const Eigen::Vector2d gamma0(1.2, -0.7);
    Eigen::VectorXd y = data.X * gamma0 + K * beta;
    sampler.set_response(y);
    sampler.set_state(Eigen::Vector2d::Zero(), 1e-20, beta, 1);
    sampler.update_gamma(1);
    CHECK(sampler.gamma()[0] == doctest::Approx(1.2).epsilon(1e-7));
    CHECK(sampler.gamma()[1] == doctest::Approx(-0.7).epsilon(1e-7));
  }
}

TEST_CASE("update_sigma2 draws the stated inverse gamma") {
  const MultiresGrid g = grid_1d(2, 1);
  Dataset data;
  data.dim = 1;
  const long n = 10;
  data.X = Eigen::MatrixXd::Ones(n, 1);
  data.y = Eigen::VectorXd::Zero(n);
  data.y[0] = 2.0;  // ||residual||^2 = 4 with gamma = 0 and beta = 0
  data.locations.assign(static_cast<std::size_t>(n), Point{5.0, 0.0});
  Hyperparams hyper;
  hyper.h_eta = 1;
  hyper.a_sigma = 2.0;
  hyper.b_sigma = 1.0;
  ChainConfig cfg;
  cfg.seed = 23;
  GibbsSampler sampler(data, g, hyper, cfg);

  SUBCASE("IG(n/2 + a, b + rss/2) = IG(7, 3)") {
    sampler.set_state(Eigen::VectorXd::Zero(1), 1.0, Eigen::VectorXd::Zero(g.total_nodes), 1);
    sampler.update_sigma2(4);
    Rng replay(stream_key(cfg.seed, Phase::sigma, 4, 0));
    CHECK(sampler.sigma2() == replay.inv_gamma(7.0, 3.0));
  }
  SUBCASE("zero residual gives IG(n/2 + a, b)") {
    sampler.set_response(Eigen::VectorXd::Zero(n));
    sampler.set_state(Eigen::VectorXd::Zero(1), 1.0, Eigen::VectorXd::Zero(g.total_nodes), 1);
    sampler.update_sigma2(9);
    Rng replay(stream_key(cfg.seed, Phase::sigma, 9, 0));
    CHECK(sampler.sigma2() == replay.inv_gamma(7.0, 1.0));
  }
  SUBCASE("long-run mean matches rate/(shape-1)") {
    sampler.set_state(Eigen::VectorXd::Zero(1), 1.0, Eigen::VectorXd::Zero(g.total_nodes), 1);
    std::vector<double> draws;
    for (long t = 1; t <= 20000; ++t) {
      sampler.update_sigma2(t);
      draws.push_back(sampler.sigma2());
    }
    CHECK(mdct_test::mean_of(draws) == doctest::Approx(3.0 / 6.0).epsilon(0.02));
  }
}

TEST_CASE("select_eta") {
  SUBCASE("singleton grid always returns 1") {
    const MultiresGrid g = grid_1d(4, 1);
    const Dataset data = make_1d_data(50, g, 5);
    GibbsSampler sampler(data, g, Hyperparams{.h_eta = 1}, ChainConfig{.seed = 1});
    for (long t = 1; t <= 5; ++t) CHECK(sampler.select_eta(t) == 1);
  }
  SUBCASE("state generated under K_2 selects eta=2") {
    const MultiresGrid g = grid_1d(12, 2);
    Rng rng(41);
    Dataset data;
    data.dim = 1;
    const long n = 400;
    data.locations.resize(static_cast<std::size_t>(n));
    data.X = Eigen::MatrixXd::Ones(n, 1);
    data.y.resize(n);
    for (long i = 0; i < n; ++i) {
      data.locations[static_cast<std::size_t>(i)] = Point{10.0 * rng.uniform(), 0.0};
    }
    Eigen::VectorXd beta_true(g.total_nodes);
    for (long c = 0; c < g.total_nodes; ++c) beta_true[c] = (c % 2 == 0 ? 2.0 : -2.0);
    Hyperparams hyper;  // h_eta = 5
    GibbsSampler sampler(data, g, hyper, ChainConfig{.seed = 2});
    const Eigen::MatrixXd K2 = densify(sampler.design(2));
    Eigen::VectorXd y = K2 * beta_true;
    for (long i = 0; i < n; ++i) y[i] += 0.02 * rng.normal();
    sampler.set_response(y);
    sampler.set_state(Eigen::VectorXd::Zero(1), 1.0, beta_true, 1);
    CHECK(sampler.select_eta(1) == 2);
  }
  SUBCASE("smooth long-range data keeps eta=1 dominant after warmup") {
    // Mirrors the sea-surface regime where eta=1 is selected overwhelmingly.
    const MultiresGrid g = grid_1d(10, 2);
    Rng rng(43);
    Dataset data;
    data.dim = 1;
    const long n = 500;
    data.locations.resize(static_cast<std::size_t>(n));
    data.X = Eigen::MatrixXd::Ones(n, 1);
    data.y.resize(n);
    for (long i = 0; i < n; ++i) {
      data.locations[static_cast<std::size_t>(i)] = Point{10.0 * rng.uniform(), 0.0};
    }
    Hyperparams hyper;
    GibbsSampler prep(data, g, hyper, ChainConfig{.seed = 3});
    Eigen::VectorXd beta_true(g.total_nodes);
    for (long c = 0; c < g.total_nodes; ++c) beta_true[c] = (c % 2 == 0 ? 1.5 : -1.0);
    const Eigen::MatrixXd K1 = densify(prep.design(1));
    Eigen::VectorXd y = K1 * beta_true;
    for (long i = 0; i < n; ++i) y[i] += 0.05 * rng.normal();
    data.y = y;

    ChainConfig cfg;
    cfg.n_iter = 150;
    cfg.burn_in = 50;
    cfg.seed = 4;
    const ChainSamples chain = run_chain(data, g, hyper, cfg);
    long eta1 = 0;
    for (int e : chain.eta_draws) eta1 += e == 1 ? 1 : 0;
    CHECK(static_cast<double>(eta1) / static_cast<double>(chain.stored()) >= 0.8);
  }
}

TEST_CASE("single-block grids make all modes identical draw for draw") {
  const MultiresGrid g = grid_1d(1, 3);
  const Dataset data = make_1d_data(60, g, 19);
  Hyperparams hyper;
  hyper.h_eta = 2;
  ChainConfig cfg;
  cfg.n_iter = 10;
  cfg.burn_in = 0;
  cfg.seed = 77;

  cfg.mode = Mode::sequential;
  const ChainSamples seq = run_chain(data, g, hyper, cfg);
  cfg.mode = Mode::chromatic;
  cfg.workers = 4;
  const ChainSamples chrom = run_chain(data, g, hyper, cfg);
  cfg.mode = Mode::jacobi;
  const ChainSamples jac = run_chain(data, g, hyper, cfg);

  CHECK(chains_identical(seq, chrom));
  CHECK(chains_identical(seq, jac));
}

TEST_CASE("1d eta=1 interaction graph colors with at most 3 colors") {
  const MultiresGrid g = grid_1d(10, 2);
  const Dataset data = make_1d_data(100, g, 23);
  GibbsSampler sampler(data, g, Hyperparams{.h_eta = 2}, ChainConfig{.seed = 5});
  CHECK(sampler.n_colors(1) <= 3);
  // Scan order is a permutation of all blocks.
  auto scan = sampler.scan_order(1);
  std::sort(scan.begin(), scan.end());
  for (long m = 1; m <= g.J_at(1); ++m) CHECK(scan[static_cast<std::size_t>(m - 1)] == m);
}

TEST_CASE("determinism: equal seed and mode reproduce bit-identical chains") {
  const MultiresGrid g = grid_1d(6, 2);
  const Dataset data = make_1d_data(150, g, 29);
  Hyperparams hyper;
  hyper.h_eta = 3;
  ChainConfig cfg;
  cfg.n_iter = 40;
  cfg.burn_in = 10;
  cfg.seed = 31;

  for (Mode mode : {Mode::sequential, Mode::chromatic, Mode::jacobi}) {
    cfg.mode = mode;
    cfg.workers = mode == Mode::sequential ? 1 : 4;
    const ChainSamples a = run_chain(data, g, hyper, cfg);
    const ChainSamples b = run_chain(data, g, hyper, cfg);
    CHECK(chains_identical(a, b));
  }
}

TEST_CASE("sequential and chromatic chains are bit-identical at equal seed") {
  const MultiresGrid g = grid_1d(9, 2);
  const Dataset data = make_1d_data(200, g, 37);
  Hyperparams hyper;
  hyper.h_eta = 2;
  ChainConfig cfg;
  cfg.n_iter = 30;
  cfg.burn_in = 5;
  cfg.seed = 41;

  cfg.mode = Mode::sequential;
  cfg.workers = 1;
  const ChainSamples seq = run_chain(data, g, hyper, cfg);
  for (int workers : {1, 2, 4}) {
    cfg.mode = Mode::chromatic;
    cfg.workers = workers;
    const ChainSamples chrom = run_chain(data, g, hyper, cfg);
    CHECK(chains_identical(seq, chrom));
  }
}

TEST_CASE("block updates touch only local rows and neighbor blocks") {
  const MultiresGrid g = grid_2d(5, 5, 2);
  Rng rng(47);
  Dataset data;
  data.dim = 2;
  const long n = 600;
  data.locations.resize(static_cast<std::size_t>(n));
  data.X = Eigen::MatrixXd::Ones(n, 1);
  data.y.resize(n);
  for (long i = 0; i < n; ++i) {
    data.locations[static_cast<std::size_t>(i)] = Point{rng.uniform(), rng.uniform()};
    data.y[i] = rng.normal();
  }
  Hyperparams hyper;
  hyper.h_eta = 2;
  GibbsSampler sampler(data, g, hyper, ChainConfig{.seed = 53});
  sampler.enable_access_log(true);

  for (long t = 1; t <= 2; ++t) {
    sampler.select_eta(t);
    sampler.update_beta_blocks(t);
    const int eta = sampler.eta();
    const double radius = eta * g.max_spacing(1);
    const SparseDesign& ds = sampler.design(eta);
    for (long m = 1; m <= g.J_at(1); ++m) {
      const auto neighbors = neighborhood(m, eta, g, NeighborhoodKind::blocks);
      const Point& center = g.knot(TreeIndex{m, 1});
      for (long i : sampler.access_log()[static_cast<std::size_t>(m - 1)]) {
        // Rows read lie strictly inside the eta-spacing data ball.
        CHECK(std::sqrt(sq_dist(data.locations[static_cast<std::size_t>(i)], center, 2)) <
              radius);
        // Every beta entry influencing those rows belongs to N(m) or m itself.
        for (auto k = ds.row_ptr[static_cast<std::size_t>(i)];
             k < ds.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
          const long col = ds.col[static_cast<std::size_t>(k)];
          const long owner = g.block_of(g.node_from_id(col));
          const bool local =
              owner == m || std::find(neighbors.begin(), neighbors.end(), owner) != neighbors.end();
          CHECK(local);
        }
      }
    }
  }
}

TEST_CASE("gibbs means match the closed-form conjugate posterior") {
  // n=50, 1d, R=2, J(1)=4, with delta, sigma2 and gamma frozen.
  const MultiresGrid g = grid_1d(4, 2);
  const Dataset data = make_1d_data(50, g, 61, 0.4);
  Hyperparams hyper;
  hyper.h_eta = 1;
  ChainConfig cfg;
  cfg.seed = 67;
  GibbsSampler sampler(data, g, hyper, cfg);
  sampler.freeze_gamma(true);
  sampler.freeze_deltas(true);
  sampler.fix_sigma2(0.16);

  const Eigen::MatrixXd K = densify(sampler.design(1));
  const Eigen::VectorXd resid = data.y - data.X * sampler.gamma();
  Eigen::MatrixXd precision = K.transpose() * K / sampler.sigma2();
  for (long c = 0; c < g.total_nodes; ++c) {
    precision(c, c) += 1.0 / sampler.shrinkage().alpha[static_cast<std::size_t>(c)];
  }
  const Eigen::VectorXd exact_mean =
      precision.llt().solve(K.transpose() * resid / sampler.sigma2());

  const long burn = 500;
  const long keep = 20000;
  std::vector<std::vector<double>> chains(static_cast<std::size_t>(g.total_nodes));
  for (long t = 1; t <= burn + keep; ++t) {
    sampler.select_eta(t);
    sampler.update_beta_blocks(t);
    if (t > burn) {
      for (long c = 0; c < g.total_nodes; ++c) {
        chains[static_cast<std::size_t>(c)].push_back(sampler.beta()[c]);
      }
    }
  }
  for (long c = 0; c < g.total_nodes; ++c) {
    const double mean = mdct_test::mean_of(chains[static_cast<std::size_t>(c)]);
    const double se = mdct_test::mc_se(chains[static_cast<std::size_t>(c)]);
    CHECK(std::fabs(mean - exact_mean[c]) <= 3.0 * std::max(se, 1e-12));
  }
}

TEST_CASE("run_chain records per-iteration timings and metadata") {
  const MultiresGrid g = grid_1d(4, 2);
  const Dataset data = make_1d_data(50, g, 71);
  Hyperparams hyper;
  hyper.h_eta = 2;
  ChainConfig cfg;
  cfg.n_iter = 12;
  cfg.burn_in = 4;
  cfg.thin = 2;
  cfg.seed = 73;
  const ChainSamples chain = run_chain(data, g, hyper, cfg);
  CHECK(chain.stored() == 4);
  CHECK(static_cast<long>(chain.iter_seconds.size()) == 12);
  CHECK(static_cast<long>(chain.eta_draws.size()) == 4);
  CHECK(static_cast<long>(chain.beta_draws.size()) == 4 * g.total_nodes);
  CHECK(chain.n_delta == g.total_nodes - g.J_at(1));
}
