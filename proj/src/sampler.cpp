#include "mdct/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mdct/errors.hpp"
#include "mdct/parallel.hpp"

namespace mdct {

void Hyperparams::validate() const {
  if (!(c > 2.0)) throw config_error("shrinkage shape c must exceed 2");
  if (!(a_sigma > 0.0) || !(b_sigma > 0.0)) {
    throw config_error("sigma^2 inverse-gamma hyperparameters must be positive");
  }
  if (h_eta < 1) throw config_error("eta grid size must be >= 1");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::sequential: return "sequential";
    case Mode::chromatic: return "chromatic";
    case Mode::jacobi: return "jacobi";
  }
  return "sequential";
}

Mode mode_from_name(const std::string& name) {
  if (name == "sequential") return Mode::sequential;
  if (name == "chromatic") return Mode::chromatic;
  if (name == "jacobi") return Mode::jacobi;
  throw config_error("unknown mode: " + name);
}

void ChainConfig::validate() const {
  if (n_iter < 0 || burn_in < 0) throw config_error("iteration counts must be nonnegative");
  if (n_iter < burn_in) throw config_error("n_iter must be at least burn_in");
  if (thin < 1) throw config_error("thin must be >= 1");
  if (workers < 1) throw config_error("workers must be >= 1");
}

long ChainConfig::stored_count() const {
  return (n_iter - burn_in + thin - 1) / thin;
}

void validate_dataset(const Dataset& data, const DomainBox& box) {
  const long n = data.y.size();
  if (n < 1) throw data_error("dataset is empty");
  if (data.X.rows() != n || static_cast<long>(data.locations.size()) != n) {
    throw data_error("dataset fields have inconsistent row counts");
  }
  if (data.X.cols() < 1) throw data_error("predictor matrix has no columns");
  for (const Point& s : data.locations) {
    if (!box.contains(s)) throw data_error("dataset location outside the domain box");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < data.X.cols()) {
    throw data_error("predictor matrix X is rank deficient");
  }
}

GibbsSampler::GibbsSampler(const Dataset& data, const MultiresGrid& grid,
                           const Hyperparams& hyper, const ChainConfig& cfg)
    : grid_(grid), hyper_(hyper), cfg_(cfg) {
  hyper_.validate();
  cfg_.validate();
  validate_dataset(data, grid.box);
  if (data.dim != grid.dim()) throw data_error("dataset and grid dimensions differ");

  y_ = data.y;
  X_ = data.X;
  locations_ = data.locations;
  n_ = data.n();
  p_ = data.p();
  q_ = grid_.subtree_size(1);

  // Column bookkeeping shared by all designs.
  q_offset_.assign(static_cast<std::size_t>(grid_.R), 0);
  pow_p_.assign(static_cast<std::size_t>(grid_.R), 1);
  for (int r = 2; r <= grid_.R; ++r) {
    pow_p_[static_cast<std::size_t>(r - 1)] = pow_p_[static_cast<std::size_t>(r - 2)] * grid_.P;
    q_offset_[static_cast<std::size_t>(r - 1)] =
        q_offset_[static_cast<std::size_t>(r - 2)] + pow_p_[static_cast<std::size_t>(r - 2)];
  }
  col2block_.resize(static_cast<std::size_t>(grid_.total_nodes));
  col2local_.resize(static_cast<std::size_t>(grid_.total_nodes));
  for (int r = 1; r <= grid_.R; ++r) {
    const long base = grid_.node_offset[static_cast<std::size_t>(r - 1)];
    const long width = pow_p_[static_cast<std::size_t>(r - 1)];
    for (long j = 0; j < grid_.J_at(r); ++j) {
      col2block_[static_cast<std::size_t>(base + j)] = static_cast<std::int32_t>(j / width);
      col2local_[static_cast<std::size_t>(base + j)] =
          static_cast<std::int32_t>(q_offset_[static_cast<std::size_t>(r - 1)] + j % width);
    }
  }

  designs_.reserve(static_cast<std::size_t>(hyper_.h_eta));
  for (int e = 1; e <= hyper_.h_eta; ++e) {
    designs_.push_back(build_design(locations_, grid_, static_cast<double>(e), cfg_.workers));
  }
  build_plans();

  const Eigen::MatrixXd xtx = X_.transpose() * X_;
  xtx_llt_.compute(xtx);
  if (xtx_llt_.info() != Eigen::Success) {
    throw data_error("X'X factorization failed (rank-deficient predictors)");
  }

  // Initialization: least-squares gamma, residual variance, beta = 0,
  // prior-mean deltas, eta = 1.
  gamma_ = xtx_llt_.solve(X_.transpose() * y_);
  const double rss = (y_ - X_ * gamma_).squaredNorm();
  sigma2_ = std::max(rss / static_cast<double>(n_), 1e-10);
  beta_ = Eigen::VectorXd::Zero(grid_.total_nodes);
  shrink_ = make_shrinkage_state(grid_, hyper_.c);
  eta_ = 1;
  f_ = Eigen::VectorXd::Zero(n_);
  f_cand_.resize(n_, hyper_.h_eta);

  const int ws_count = std::max(1, std::min(cfg_.workers, max_hardware_workers()));
  workspaces_.resize(static_cast<std::size_t>(std::max(cfg_.workers, ws_count)));
  jacobi_delta_.resize(static_cast<std::size_t>(grid_.J_at(1)));
  access_log_.resize(static_cast<std::size_t>(grid_.J_at(1)));
}

void GibbsSampler::build_plans() {
  plans_.resize(designs_.size());
  const long n_blocks = grid_.J_at(1);
  for (std::size_t d = 0; d < designs_.size(); ++d) {
    BlockPlan& plan = plans_[d];
    const SparseDesign& ds = designs_[d];
    plan.rows.assign(static_cast<std::size_t>(n_blocks), {});

    // I_m: rows with at least one nonzero in block m's columns.
    std::vector<std::int32_t> seen;
    for (long i = 0; i < n_; ++i) {
      seen.clear();
      for (std::int64_t k = ds.row_ptr[static_cast<std::size_t>(i)];
           k < ds.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
        const std::int32_t b = col2block_[static_cast<std::size_t>(ds.col[static_cast<std::size_t>(k)])];
        if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
          seen.push_back(b);
          plan.rows[static_cast<std::size_t>(b)].push_back(i);
        }
      }
    }

    // Interaction graph: blocks whose resolution-1 kernels overlap. Greedy
    // coloring in index order; the color-major order is the scan order for
    // both the sequential and the chromatic schedule.
    const double eta = designs_[d].eta;
    plan.color.assign(static_cast<std::size_t>(n_blocks), -1);
    int max_color = -1;
    std::vector<char> used;
    for (long m = 1; m <= n_blocks; ++m) {
      used.assign(static_cast<std::size_t>(max_color + 2), 0);
      for (long j : neighborhood(m, eta, grid_, NeighborhoodKind::blocks)) {
        if (j == m) continue;
        const int c = plan.color[static_cast<std::size_t>(j - 1)];
        if (c >= 0 && c < static_cast<int>(used.size())) used[static_cast<std::size_t>(c)] = 1;
      }
      int c = 0;
      while (c < static_cast<int>(used.size()) && used[static_cast<std::size_t>(c)]) ++c;
      plan.color[static_cast<std::size_t>(m - 1)] = c;
      max_color = std::max(max_color, c);
    }
    plan.n_colors = max_color + 1;
    plan.classes.assign(static_cast<std::size_t>(plan.n_colors), {});
    for (long m = 1; m <= n_blocks; ++m) {
      plan.classes[static_cast<std::size_t>(plan.color[static_cast<std::size_t>(m - 1)])]
          .push_back(m);
    }
    plan.scan.clear();
    plan.scan.reserve(static_cast<std::size_t>(n_blocks));
    for (const auto& cls : plan.classes) {
      plan.scan.insert(plan.scan.end(), cls.begin(), cls.end());
    }
  }
}

void GibbsSampler::block_columns(long m, std::vector<long>& cols) const {
  cols.resize(static_cast<std::size_t>(q_));
  long w = 0;
  for (int r = 1; r <= grid_.R; ++r) {
    const long width = pow_p_[static_cast<std::size_t>(r - 1)];
    const long base = grid_.node_offset[static_cast<std::size_t>(r - 1)] + (m - 1) * width;
    for (long t = 0; t < width; ++t) cols[static_cast<std::size_t>(w++)] = base + t;
  }
}

void GibbsSampler::compute_block_system(long m, const SparseDesign& ds,
                                        const std::vector<long>& rows,
                                        const Eigen::VectorXd& f_source, Workspace& w) const {
  const long q = q_;
  if (w.M.rows() != q) {
    w.M.resize(q, q);
    w.t1.resize(q);
    w.beta_old.resize(q);
    w.beta_new.resize(q);
    w.alpha_inv.resize(q);
    w.z.resize(q);
    w.buf.resize(q);
  }
  w.M.setZero();
  w.t1.setZero();
  w.gather_idx.clear();
  w.gather_val.clear();
  w.gather_cnt.clear();
  w.gather_cnt.reserve(rows.size());

  const std::int32_t mb = static_cast<std::int32_t>(m - 1);
  for (long i : rows) {
    const double g = y_[i] - X_.row(i).dot(gamma_) - f_source[i];
    int cnt = 0;
    for (std::int64_t k = ds.row_ptr[static_cast<std::size_t>(i)];
         k < ds.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const std::int32_t c = ds.col[static_cast<std::size_t>(k)];
      if (col2block_[static_cast<std::size_t>(c)] == mb) {
        w.gather_idx.push_back(col2local_[static_cast<std::size_t>(c)]);
        w.gather_val.push_back(ds.val[static_cast<std::size_t>(k)]);
        ++cnt;
      }
    }
    w.gather_cnt.push_back(cnt);
    const std::size_t base = w.gather_idx.size() - static_cast<std::size_t>(cnt);
    for (int a = 0; a < cnt; ++a) {
      const std::int32_t ia = w.gather_idx[base + static_cast<std::size_t>(a)];
      const double va = w.gather_val[base + static_cast<std::size_t>(a)];
      w.t1[ia] += va * g;
      for (int b = 0; b <= a; ++b) {
        const std::int32_t ib = w.gather_idx[base + static_cast<std::size_t>(b)];
        const double vb = w.gather_val[base + static_cast<std::size_t>(b)];
        if (ia >= ib) {
          w.M(ia, ib) += va * vb;
        } else {
          w.M(ib, ia) += va * vb;
        }
      }
    }
  }
}

void GibbsSampler::update_block(long m, long iter, const Eigen::VectorXd& f_source,
                                bool apply_f, Workspace& w) {
  const SparseDesign& ds = designs_[static_cast<std::size_t>(eta_ - 1)];
  const std::vector<long>& rows =
      plans_[static_cast<std::size_t>(eta_ - 1)].rows[static_cast<std::size_t>(m - 1)];
  compute_block_system(m, ds, rows, f_source, w);

  block_columns(m, w.block_cols);
  for (long t = 0; t < q_; ++t) {
    const long c = w.block_cols[static_cast<std::size_t>(t)];
    w.beta_old[t] = beta_[c];
    w.alpha_inv[t] = flat_prior_ ? 1.0 / flat_prior_var_
                                 : 1.0 / shrink_.alpha[static_cast<std::size_t>(c)];
  }

  // Q = A'A/sigma2 + diag(1/alpha); b = A'r/sigma2 with r the residual that
  // excludes this block's own contribution: A'r = t1 + (A'A) beta_old.
  const double inv_s2 = 1.0 / sigma2_;
  w.buf = w.t1 + w.M.selfadjointView<Eigen::Lower>() * w.beta_old;  // A'r
  Eigen::MatrixXd Q = w.M * inv_s2;
  Q.diagonal() += w.alpha_inv;
  Eigen::VectorXd b = w.buf * inv_s2;

  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    // Q is SPD in exact arithmetic; jitter only as a numerical guard.
    Q.diagonal().array() += 1e-10 * Q.trace() / static_cast<double>(q_);
    llt.compute(Q);
    if (llt.info() != Eigen::Success) {
      throw numeric_error("block precision matrix is not positive definite");
    }
  }

  Rng rng(stream_key(cfg_.seed, Phase::beta, static_cast<std::uint64_t>(iter),
                     static_cast<std::uint64_t>(m)));
  for (long t = 0; t < q_; ++t) w.z[t] = rng.normal();
  w.beta_new = llt.solve(b) + llt.matrixU().solve(w.z);

  for (long t = 0; t < q_; ++t) {
    beta_[w.block_cols[static_cast<std::size_t>(t)]] = w.beta_new[t];
  }
  w.buf = w.beta_new - w.beta_old;  // delta

  if (apply_f) {
    std::size_t pos = 0;
    std::size_t row_idx = 0;
    for (long i : rows) {
      const int cnt = w.gather_cnt[row_idx++];
      double acc = 0.0;
      for (int a = 0; a < cnt; ++a) {
        acc += w.gather_val[pos + static_cast<std::size_t>(a)] *
               w.buf[w.gather_idx[pos + static_cast<std::size_t>(a)]];
      }
      pos += static_cast<std::size_t>(cnt);
      f_[i] += acc;
    }
  } else {
    jacobi_delta_[static_cast<std::size_t>(m - 1)] = w.buf;
  }

  if (log_access_) {
    access_log_[static_cast<std::size_t>(m - 1)] = rows;
  }
}

void GibbsSampler::apply_block_delta(long m, const SparseDesign& ds,
                                     const std::vector<long>& rows,
                                     const Eigen::VectorXd& delta, Workspace&) {
  const std::int32_t mb = static_cast<std::int32_t>(m - 1);
  for (long i : rows) {
    double acc = 0.0;
    for (std::int64_t k = ds.row_ptr[static_cast<std::size_t>(i)];
         k < ds.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const std::int32_t c = ds.col[static_cast<std::size_t>(k)];
      if (col2block_[static_cast<std::size_t>(c)] == mb) {
        acc += ds.val[static_cast<std::size_t>(k)] * delta[col2local_[static_cast<std::size_t>(c)]];
      }
    }
    f_[i] += acc;
  }
}

GibbsSampler::BlockParams GibbsSampler::block_conditional(long m) const {
  if (m < 1 || m > grid_.J_at(1)) throw config_error("block index out of range");
  Workspace& w = workspaces_[0];
  const SparseDesign& ds = designs_[static_cast<std::size_t>(eta_ - 1)];
  const std::vector<long>& rows =
      plans_[static_cast<std::size_t>(eta_ - 1)].rows[static_cast<std::size_t>(m - 1)];
  compute_block_system(m, ds, rows, f_, w);

  std::vector<long> cols;
  block_columns(m, cols);
  Eigen::VectorXd beta_old(q_), alpha_inv(q_);
  for (long t = 0; t < q_; ++t) {
    beta_old[t] = beta_[cols[static_cast<std::size_t>(t)]];
    alpha_inv[t] = flat_prior_ ? 1.0 / flat_prior_var_
                               : 1.0 / shrink_.alpha[static_cast<std::size_t>(cols[static_cast<std::size_t>(t)])];
  }
  BlockParams out;
  const double inv_s2 = 1.0 / sigma2_;
  Eigen::MatrixXd M = w.M.selfadjointView<Eigen::Lower>();
  out.precision = M * inv_s2;
  out.precision.diagonal() += alpha_inv;
  out.lin = (w.t1 + M * beta_old) * inv_s2;
  out.mean = out.precision.llt().solve(out.lin);
  return out;
}

int GibbsSampler::select_eta(long iter) {
  (void)iter;
  const int h = hyper_.h_eta;
  std::vector<double> rss(static_cast<std::size_t>(h), 0.0);
  for (int e = 1; e <= h; ++e) {
    const SparseDesign& ds = designs_[static_cast<std::size_t>(e - 1)];
    double* fcol = f_cand_.col(e - 1).data();
    rss[static_cast<std::size_t>(e - 1)] =
        reduce_chunks(n_, cfg_.workers, [&](std::int64_t b, std::int64_t eend) {
          double acc = 0.0;
          for (std::int64_t i = b; i < eend; ++i) {
            const double fv = ds.row_dot(i, beta_.data());
            fcol[i] = fv;
            const double r = y_[i] - X_.row(i).dot(gamma_) - fv;
            acc += r * r;
          }
          return acc;
        });
  }
  // Gaussian log likelihood differs across candidates only through the
  // residual sum, so the argmax is the argmin RSS; ties pick the smallest eta.
  int best = 1;
  for (int e = 2; e <= h; ++e) {
    if (rss[static_cast<std::size_t>(e - 1)] < rss[static_cast<std::size_t>(best - 1)]) {
      best = e;
    }
  }
  eta_ = best;
  f_ = f_cand_.col(best - 1);
  return eta_;
}

void GibbsSampler::update_beta_blocks(long iter) {
  const BlockPlan& plan = plans_[static_cast<std::size_t>(eta_ - 1)];
  switch (cfg_.mode) {
    case Mode::sequential: {
      for (long m : plan.scan) {
        update_block(m, iter, f_, true, workspaces_[0]);
      }
      break;
    }
    case Mode::chromatic: {
      for (const auto& cls : plan.classes) {
        parallel_items(static_cast<std::int64_t>(cls.size()), cfg_.workers,
                       [&](std::int64_t t) {
                         update_block(cls[static_cast<std::size_t>(t)], iter, f_, true,
                                      workspaces_[static_cast<std::size_t>(current_thread_index())]);
                       });
      }
      break;
    }
    case Mode::jacobi: {
      f_snapshot_ = f_;
      parallel_items(static_cast<std::int64_t>(plan.scan.size()), cfg_.workers,
                     [&](std::int64_t t) {
                       update_block(plan.scan[static_cast<std::size_t>(t)], iter, f_snapshot_,
                                    false,
                                    workspaces_[static_cast<std::size_t>(current_thread_index())]);
                     });
      const SparseDesign& ds = designs_[static_cast<std::size_t>(eta_ - 1)];
      for (long m : plan.scan) {
        apply_block_delta(m, ds, plan.rows[static_cast<std::size_t>(m - 1)],
                          jacobi_delta_[static_cast<std::size_t>(m - 1)], workspaces_[0]);
      }
      break;
    }
  }
}

void GibbsSampler::update_gamma(long iter) {
  if (gamma_frozen_) return;
  Eigen::VectorXd xtres(p_);
  for (int k = 0; k < p_; ++k) {
    const double* xcol = X_.col(k).data();
    xtres[k] = reduce_chunks(n_, cfg_.workers, [&](std::int64_t b, std::int64_t e) {
      double acc = 0.0;
      for (std::int64_t i = b; i < e; ++i) acc += xcol[i] * (y_[i] - f_[i]);
      return acc;
    });
  }
  const Eigen::VectorXd mean = xtx_llt_.solve(xtres);
  Rng rng(stream_key(cfg_.seed, Phase::gamma, static_cast<std::uint64_t>(iter), 0));
  Eigen::VectorXd z(p_);
  for (int k = 0; k < p_; ++k) z[k] = rng.normal();
  gamma_ = mean + std::sqrt(sigma2_) * xtx_llt_.matrixU().solve(z);
}

double GibbsSampler::residual_sum_squares(const Eigen::VectorXd& f) const {
  return reduce_chunks(n_, cfg_.workers, [&](std::int64_t b, std::int64_t e) {
    double acc = 0.0;
    for (std::int64_t i = b; i < e; ++i) {
      const double r = y_[i] - X_.row(i).dot(gamma_) - f[i];
      acc += r * r;
    }
    return acc;
  });
}

void GibbsSampler::update_sigma2(long iter) {
  if (sigma2_fixed_) return;
  const double rss = residual_sum_squares(f_);
  Rng rng(stream_key(cfg_.seed, Phase::sigma, static_cast<std::uint64_t>(iter), 0));
  sigma2_ = rng.inv_gamma(0.5 * static_cast<double>(n_) + hyper_.a_sigma,
                          hyper_.b_sigma + 0.5 * rss);
}

void GibbsSampler::update_deltas(long iter) {
  if (deltas_frozen_ || flat_prior_) return;
  for (int r = 2; r <= grid_.R; ++r) {
    for (long j = 1; j <= grid_.J_at(r); ++j) {
      const TreeIndex idx{j, r};
      Rng rng(stream_key(cfg_.seed, Phase::delta, static_cast<std::uint64_t>(iter),
                         static_cast<std::uint64_t>(grid_.node_id(idx))));
      update_delta_jr(idx, beta_.data(), shrink_, grid_, rng);
    }
  }
  Rng rng(stream_key(cfg_.seed, Phase::delta, static_cast<std::uint64_t>(iter),
                     static_cast<std::uint64_t>(grid_.total_nodes)));
  update_delta1(beta_.data(), shrink_, grid_, rng);
}

void GibbsSampler::update_latent_response(long iter) {
  if (binary_targets_.empty()) return;
  for_chunks(n_, cfg_.workers, [&](std::int64_t b, std::int64_t e, std::int64_t chunk) {
    Rng rng(stream_key(cfg_.seed, Phase::latent, static_cast<std::uint64_t>(iter),
                       static_cast<std::uint64_t>(chunk)));
    for (std::int64_t i = b; i < e; ++i) {
      const double mu = X_.row(i).dot(gamma_) + f_[i];
      y_[i] = rng.truncated_normal_unit_var(mu, binary_targets_[static_cast<std::size_t>(i)] == 1);
    }
  });
}

void GibbsSampler::iterate(long iter) {
  update_latent_response(iter);
  select_eta(iter);
  update_beta_blocks(iter);
  update_gamma(iter);
  update_sigma2(iter);
  update_deltas(iter);
}

ModelState GibbsSampler::snapshot() const {
  ModelState s;
  s.gamma = gamma_;
  s.sigma2 = sigma2_;
  s.beta = beta_;
  s.shrink = shrink_;
  s.eta = eta_;
  return s;
}

void GibbsSampler::set_response(const Eigen::VectorXd& y) {
  if (y.size() != n_) throw data_error("response length mismatch");
  y_ = y;
}

void GibbsSampler::set_binary_targets(const std::vector<int>& y01) {
  if (static_cast<long>(y01.size()) != n_) throw data_error("target length mismatch");
  for (int v : y01) {
    if (v != 0 && v != 1) throw data_error("binary targets must be 0 or 1");
  }
  binary_targets_ = y01;
}

void GibbsSampler::fix_sigma2(double value) {
  if (!(value > 0.0)) throw config_error("sigma^2 must be positive");
  sigma2_ = value;
  sigma2_fixed_ = true;
}

void GibbsSampler::set_flat_prior(double var) {
  if (!(var > 0.0)) throw config_error("flat prior variance must be positive");
  flat_prior_ = true;
  flat_prior_var_ = var;
}

void GibbsSampler::set_state(const Eigen::VectorXd& gamma, double sigma2,
                             const Eigen::VectorXd& beta, int eta) {
  if (gamma.size() != p_ || beta.size() != grid_.total_nodes) {
    throw config_error("state dimensions mismatch");
  }
  if (eta < 1 || eta > hyper_.h_eta) throw config_error("eta out of range");
  if (!(sigma2 > 0.0)) throw config_error("sigma^2 must be positive");
  gamma_ = gamma;
  sigma2_ = sigma2;
  beta_ = beta;
  eta_ = eta;
  const SparseDesign& ds = designs_[static_cast<std::size_t>(eta_ - 1)];
  for_chunks(n_, cfg_.workers, [&](std::int64_t b, std::int64_t e, std::int64_t) {
    for (std::int64_t i = b; i < e; ++i) f_[i] = ds.row_dot(i, beta_.data());
  });
}

void GibbsSampler::enable_access_log(bool on) {
  log_access_ = on;
  if (on) access_log_.assign(static_cast<std::size_t>(grid_.J_at(1)), {});
}

ChainSamples run_chain(const Dataset& data, const MultiresGrid& grid, const Hyperparams& hyper,
                       const ChainConfig& cfg) {
  cfg.validate();
  GibbsSampler sampler(data, grid, hyper, cfg);
  return run_prepared_chain(sampler, grid, hyper, cfg, data.p(), "gaussian");
}

ChainSamples run_prepared_chain(GibbsSampler& sampler, const MultiresGrid& grid,
                                const Hyperparams& hyper, const ChainConfig& cfg, int p,
                                const std::string& family) {
  cfg.validate();
  ChainSamples out;
  out.family = family;
  out.grid_spec = GridSpec{grid.box, grid.R, grid.J1};
  out.hyper = hyper;
  out.n_iter = cfg.n_iter;
  out.burn_in = cfg.burn_in;
  out.thin = cfg.thin;
  out.seed = cfg.seed;
  out.mode = cfg.mode;
  out.workers = cfg.workers;
  out.p = p;
  out.n_basis = grid.total_nodes;
  out.n_delta = grid.total_nodes - grid.J_at(1);

  const long stored = cfg.stored_count();
  out.gamma_draws.reserve(static_cast<std::size_t>(stored * out.p));
  out.beta_draws.reserve(static_cast<std::size_t>(stored * out.n_basis));
  out.iter_seconds.reserve(static_cast<std::size_t>(cfg.n_iter));

  for (long t = 1; t <= cfg.n_iter; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    sampler.iterate(t);
    const auto t1 = std::chrono::steady_clock::now();
    out.iter_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    if (t > cfg.burn_in && (t - cfg.burn_in - 1) % cfg.thin == 0) {
      const auto& beta = sampler.beta();
      const auto& gamma = sampler.gamma();
      const auto& shr = sampler.shrinkage();
      out.gamma_draws.insert(out.gamma_draws.end(), gamma.data(), gamma.data() + gamma.size());
      out.sigma2_draws.push_back(sampler.sigma2());
      out.beta_draws.insert(out.beta_draws.end(), beta.data(), beta.data() + beta.size());
      out.delta1_draws.push_back(shr.delta1);
      out.delta_draws.insert(out.delta_draws.end(),
                             shr.delta.begin() + grid.J_at(1), shr.delta.end());
      out.eta_draws.push_back(sampler.eta());
    }
  }
  return out;
}

}  // namespace mdct
