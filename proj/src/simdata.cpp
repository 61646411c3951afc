#include "mdct/simdata.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

#include "mdct/errors.hpp"
#include "mdct/parallel.hpp"
#include "mdct/rng.hpp"

namespace mdct {

namespace {

constexpr long kDenseFactorizationGuard = 12000;  // O(n^3) oracle cost cap

void shuffled_indices(long n, Rng& rng, std::vector<long>& order) {
  order.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (long i = n - 1; i > 0; --i) {
    const long j = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
}

/// Simulates the 2D Matern field pieces shared by gen_2d and gen_binary.
struct Field2d {
  std::vector<Point> locations;
  Eigen::MatrixXd X;
  Eigen::VectorXd w0;
  Eigen::VectorXd lin;  // X gamma + w0
};

Field2d simulate_field_2d(long n, const MaternParams& params, const Eigen::Vector2d& gamma,
                          Rng& rng, int workers) {
  if (n < 1) throw config_error("sample size must be positive");
  if (n > kDenseFactorizationGuard) {
    throw config_error("dense Matern simulation is limited to n <= 12000");
  }
  if (!(params.theta2 > 0.0) || !(params.nu > 0.0)) {
    throw config_error("Matern parameters require theta2 > 0 and nu > 0");
  }

  Field2d out;
  out.locations.resize(static_cast<std::size_t>(n));
  out.X.resize(n, 2);
  for (long i = 0; i < n; ++i) {
    out.locations[static_cast<std::size_t>(i)] = Point{rng.uniform(), rng.uniform()};
    out.X(i, 0) = 1.0;
    out.X(i, 1) = rng.normal();
  }

  Eigen::MatrixXd cov(n, n);
  auto assemble = [&](double jitter) {
    parallel_items(n, workers, [&](std::int64_t i) {
      for (std::int64_t j = 0; j <= i; ++j) {
        const double v = matern(std::sqrt(sq_dist(out.locations[static_cast<std::size_t>(i)],
                                                  out.locations[static_cast<std::size_t>(j)], 2)),
                                params);
        cov(i, j) = v;
        cov(j, i) = v;
      }
      cov(i, i) += jitter;
    });
  };

  Eigen::VectorXd z(n);
  for (long i = 0; i < n; ++i) z[i] = rng.normal();

  // In-place factorization overwrites cov, so a failed attempt reassembles
  // with one diagonal jitter before giving up.
  assemble(0.0);
  {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(cov);
    if (llt.info() == Eigen::Success) {
      out.w0 = llt.matrixL() * z;
      out.lin = out.X * gamma + out.w0;
      return out;
    }
  }
  assemble(1e-8 * params.theta1);
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> retry(cov);
  if (retry.info() != Eigen::Success) {
    throw numeric_error("Matern covariance factorization failed");
  }
  out.w0 = retry.matrixL() * z;
  out.lin = out.X * gamma + out.w0;
  return out;
}

template <class Push>
void split_train_test(long n_total, long n_test, Rng& rng, Push&& push) {
  if (n_test < 0 || n_test >= n_total) {
    throw config_error("test size must be in [0, n_total)");
  }
  std::vector<long> order;
  shuffled_indices(n_total, rng, order);
  for (long k = 0; k < n_total; ++k) {
    push(order[static_cast<std::size_t>(k)], k >= n_total - n_test);
  }
}

}  // namespace

double w0_1d(double s) {
  if (s < 0.0 || s > 10.0) throw data_error("w0_1d argument outside [0,10]");
  if (s < 2.0) return std::sin(2.0 * std::numbers::pi * s) * s;
  if (s < 4.0) {
    const double a = std::fabs(std::sin(s - 3.0));
    return a * a * a;
  }
  if (s < 6.0) return 5.0 * std::fabs(s - 5.0);
  return std::sin(2.0 * std::numbers::pi * s) * s;
}

double matern(double dist, const MaternParams& params) {
  if (dist < 0.0) throw numeric_error("matern distance must be nonnegative");
  if (!(params.theta2 > 0.0) || !(params.nu > 0.0)) {
    throw config_error("Matern parameters require theta2 > 0 and nu > 0");
  }
  if (dist == 0.0) return params.theta1;
  const double x = dist * params.theta2;
  const double scale =
      params.theta1 / (std::pow(2.0, params.nu - 1.0) * std::tgamma(params.nu));
  return scale * std::pow(x, params.nu) * std::cyl_bessel_k(params.nu, x);
}

SimulatedData gen_1d(long n, double noise_sd, const Eigen::Vector2d& gamma,
                     std::uint64_t seed) {
  if (n < 1) throw config_error("sample size must be positive");
  if (noise_sd < 0.0) throw config_error("noise sd must be nonnegative");
  Rng rng(stream_key(seed, Phase::sim, 0, 1));

  SimulatedData out;
  out.data.dim = 1;
  out.data.locations.resize(static_cast<std::size_t>(n));
  out.data.X.resize(n, 2);
  out.data.y.resize(n);
  out.w0.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double s = 10.0 * rng.uniform();
    out.data.locations[static_cast<std::size_t>(i)] = Point{s, 0.0};
    out.data.X(i, 0) = 1.0;
    out.data.X(i, 1) = rng.normal();
    const double w = w0_1d(s);
    out.w0[static_cast<std::size_t>(i)] = w;
    out.data.y[i] = out.data.X.row(i).dot(gamma) + w + noise_sd * rng.normal();
  }
  return out;
}

TrainTest gen_2d(long n_total, long n_test, const MaternParams& params, double noise_ratio,
                 const Eigen::Vector2d& gamma, std::uint64_t seed) {
  if (!(noise_ratio > 0.0)) throw config_error("noise ratio must be positive");
  Rng rng(stream_key(seed, Phase::sim, 0, 2));
  Field2d field = simulate_field_2d(n_total, params, gamma, rng, max_hardware_workers());
  const double noise_sd = std::sqrt(params.theta1 / noise_ratio);

  Eigen::VectorXd y(n_total);
  for (long i = 0; i < n_total; ++i) y[i] = field.lin[i] + noise_sd * rng.normal();

  TrainTest out;
  for (SimulatedData* part : {&out.train, &out.test}) {
    part->data.dim = 2;
    part->data.X.resize(0, 2);
  }
  std::vector<long> train_rows, test_rows;
  split_train_test(n_total, n_test, rng, [&](long row, bool is_test) {
    (is_test ? test_rows : train_rows).push_back(row);
  });
  auto fill = [&](SimulatedData& part, const std::vector<long>& rows) {
    const long m = static_cast<long>(rows.size());
    part.data.X.resize(m, 2);
    part.data.y.resize(m);
    part.data.locations.resize(static_cast<std::size_t>(m));
    part.w0.resize(static_cast<std::size_t>(m));
    for (long k = 0; k < m; ++k) {
      const long i = rows[static_cast<std::size_t>(k)];
      part.data.X.row(k) = field.X.row(i);
      part.data.y[k] = y[i];
      part.data.locations[static_cast<std::size_t>(k)] = field.locations[static_cast<std::size_t>(i)];
      part.w0[static_cast<std::size_t>(k)] = field.w0[i];
    }
  };
  fill(out.train, train_rows);
  fill(out.test, test_rows);
  return out;
}

BinaryTrainTest gen_binary(long n_total, long n_test, const MaternParams& params,
                           const Eigen::Vector2d& gamma, std::uint64_t seed) {
  Rng rng(stream_key(seed, Phase::sim, 0, 3));
  Field2d field = simulate_field_2d(n_total, params, gamma, rng, max_hardware_workers());

  std::vector<int> y(static_cast<std::size_t>(n_total));
  for (long i = 0; i < n_total; ++i) {
    y[static_cast<std::size_t>(i)] = rng.uniform() < normal_cdf(field.lin[i]) ? 1 : 0;
  }

  BinaryTrainTest out;
  std::vector<long> train_rows, test_rows;
  split_train_test(n_total, n_test, rng, [&](long row, bool is_test) {
    (is_test ? test_rows : train_rows).push_back(row);
  });
  auto fill = [&](BinarySimulatedData& part, const std::vector<long>& rows) {
    const long m = static_cast<long>(rows.size());
    part.data.dim = 2;
    part.data.X.resize(m, 2);
    part.data.y.resize(static_cast<std::size_t>(m));
    part.data.locations.resize(static_cast<std::size_t>(m));
    part.w0.resize(static_cast<std::size_t>(m));
    for (long k = 0; k < m; ++k) {
      const long i = rows[static_cast<std::size_t>(k)];
      part.data.X.row(k) = field.X.row(i);
      part.data.y[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(i)];
      part.data.locations[static_cast<std::size_t>(k)] = field.locations[static_cast<std::size_t>(i)];
      part.w0[static_cast<std::size_t>(k)] = field.w0[i];
    }
  };
  fill(out.train, train_rows);
  fill(out.test, test_rows);
  return out;
}

SimulatedData gen_bench(long n, std::uint64_t seed) {
  if (n < 1) throw config_error("sample size must be positive");
  Rng rng(stream_key(seed, Phase::sim, 0, 4));
  SimulatedData out;
  out.data.dim = 2;
  out.data.locations.resize(static_cast<std::size_t>(n));
  out.data.X.resize(n, 2);
  out.data.y.resize(n);
  out.w0.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const Point s{rng.uniform(), rng.uniform()};
    out.data.locations[static_cast<std::size_t>(i)] = s;
    out.data.X(i, 0) = 1.0;
    out.data.X(i, 1) = rng.normal();
    const double w = std::sin(4.0 * std::numbers::pi * s.x) * std::cos(2.0 * std::numbers::pi * s.y);
    out.w0[static_cast<std::size_t>(i)] = w;
    out.data.y[i] = 1.0 + 0.5 * out.data.X(i, 1) + w + 0.2 * rng.normal();
  }
  return out;
}

}  // namespace mdct
