#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mdct/grid.hpp"
#include "mdct/kernel.hpp"
#include "mdct/rng.hpp"
#include "mdct/shrinkage.hpp"

namespace mdct {

struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // includes the intercept column
  std::vector<Point> locations;
  int dim = 1;

  long n() const { return y.size(); }
  int p() const { return static_cast<int>(X.cols()); }
};

/// Throws data_error on inconsistent sizes, rank-deficient X, or locations
/// outside the box.
void validate_dataset(const Dataset& data, const DomainBox& box);

struct Hyperparams {
  double c = 3.0;        // tree shrinkage shape, > 2
  double a_sigma = 2.0;  // sigma^2 ~ IG(a_sigma, b_sigma)
  double b_sigma = 1.0;
  int h_eta = 5;         // eta grid {1..h_eta}

  void validate() const;
};

enum class Mode { sequential, chromatic, jacobi };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct ChainConfig {
  long n_iter = 1000;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::sequential;
  int workers = 1;

  void validate() const;
  long stored_count() const;
};

struct ModelState {
  Eigen::VectorXd gamma;
  double sigma2 = 1.0;
  Eigen::VectorXd beta;  // over all nodes, node-id order
  ShrinkageState shrink;
  int eta = 1;
};

struct GridSpec {
  DomainBox box;
  int R = 1;
  std::array<int, 2> J1{1, 1};

  MultiresGrid build() const { return build_grid(box, R, J1); }
};

/// Stored posterior draws plus the metadata needed to reuse them.
struct ChainSamples {
  std::string family = "gaussian";  // gaussian | probit
  GridSpec grid_spec;
  Hyperparams hyper;
  long n_iter = 0;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::sequential;
  int workers = 1;
  int p = 0;
  long n_basis = 0;
  long n_delta = 0;  // nodes with resolution >= 2

  std::vector<double> gamma_draws;   // stored*p
  std::vector<double> sigma2_draws;  // stored
  std::vector<double> beta_draws;    // stored*n_basis
  std::vector<double> delta1_draws;  // stored
  std::vector<double> delta_draws;   // stored*n_delta
  std::vector<int> eta_draws;        // stored

  std::vector<double> iter_seconds;  // per-iteration wall time (not serialized)

  long stored() const { return static_cast<long>(sigma2_draws.size()); }
};

/// Blocked Gibbs sampler over resolution-1 subtrees. All three modes draw
/// exactly the same conditionals; they differ only in how block updates are
/// scheduled:
///   sequential - one block at a time in the fixed scan order (exact Gibbs);
///   chromatic  - non-interacting blocks of one color drawn concurrently,
///                colors visited in the same scan order (exact Gibbs);
///   jacobi     - every block drawn against the iteration-start neighbor
///                values (approximate; kept for benchmarking).
/// Sequential and chromatic execute the identical scan, so equal seeds give
/// bit-identical chains across those modes and any worker count.
class GibbsSampler {
 public:
  GibbsSampler(const Dataset& data, const MultiresGrid& grid, const Hyperparams& hyper,
               const ChainConfig& cfg);

  void iterate(long iter);

  // Individual conditional updates, in the order iterate() runs them.
  void update_latent_response(long iter);  // probit only
  int select_eta(long iter);
  void update_beta_blocks(long iter);
  void update_gamma(long iter);
  void update_sigma2(long iter);
  void update_deltas(long iter);

  ModelState snapshot() const;

  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }
  double sigma2() const { return sigma2_; }
  int eta() const { return eta_; }
  const ShrinkageState& shrinkage() const { return shrink_; }
  const Eigen::VectorXd& fitted() const { return f_; }  // K beta under current eta
  const Eigen::VectorXd& response() const { return y_; }

  long n_blocks() const { return grid_.J_at(1); }
  long block_dim() const { return q_; }
  const SparseDesign& design(int eta) const {
    return designs_[static_cast<std::size_t>(eta - 1)];
  }
  int n_colors(int eta) const { return plans_[static_cast<std::size_t>(eta - 1)].n_colors; }
  const std::vector<long>& scan_order(int eta) const {
    return plans_[static_cast<std::size_t>(eta - 1)].scan;
  }
  const std::vector<long>& block_rows(int eta, long m) const {
    return plans_[static_cast<std::size_t>(eta - 1)].rows[static_cast<std::size_t>(m - 1)];
  }

  struct BlockParams {
    Eigen::MatrixXd precision;  // Q = A'A/sigma2 + diag(1/alpha)
    Eigen::VectorXd lin;        // b = A'r/sigma2
    Eigen::VectorXd mean;       // Q^{-1} b
  };
  BlockParams block_conditional(long m) const;

  // Probit support and test hooks.
  void set_response(const Eigen::VectorXd& y);
  void set_binary_targets(const std::vector<int>& y01);  // enables latent updates
  void fix_sigma2(double value);
  void freeze_gamma(bool on) { gamma_frozen_ = on; }
  void freeze_deltas(bool on) { deltas_frozen_ = on; }
  /// Replaces the tree prior by a fixed N(0, var) prior on every coefficient
  /// (the flat-shrinkage baseline); delta updates are skipped.
  void set_flat_prior(double var);
  void set_state(const Eigen::VectorXd& gamma, double sigma2, const Eigen::VectorXd& beta,
                 int eta);

  void enable_access_log(bool on);
  /// Rows touched by the most recent update of each block.
  const std::vector<std::vector<long>>& access_log() const { return access_log_; }

 private:
  struct BlockPlan {
    std::vector<std::vector<long>> rows;  // I_m per block
    std::vector<int> color;
    std::vector<std::vector<long>> classes;  // blocks per color, ascending
    std::vector<long> scan;                  // color-major scan order
    int n_colors = 0;
  };

  struct Workspace {
    Eigen::MatrixXd M;
    Eigen::VectorXd t1, beta_old, beta_new, alpha_inv, z, buf;
    std::vector<std::int32_t> gather_idx;
    std::vector<double> gather_val;
    std::vector<std::int32_t> gather_cnt;
    std::vector<long> block_cols;
  };

  void build_plans();
  void refresh_fitted_all_candidates(bool pick_best);
  void block_columns(long m, std::vector<long>& cols) const;
  void compute_block_system(long m, const SparseDesign& ds, const std::vector<long>& rows,
                            const Eigen::VectorXd& f_source, Workspace& w) const;
  void update_block(long m, long iter, const Eigen::VectorXd& f_source, bool apply_f,
                    Workspace& w);
  void apply_block_delta(long m, const SparseDesign& ds, const std::vector<long>& rows,
                         const Eigen::VectorXd& delta, Workspace& w);
  double residual_sum_squares(const Eigen::VectorXd& f) const;

  MultiresGrid grid_;  // held by value; grids are small and copies decouple lifetimes
  Hyperparams hyper_;
  ChainConfig cfg_;

  Eigen::VectorXd y_;
  Eigen::MatrixXd X_;
  std::vector<Point> locations_;
  long n_ = 0;
  int p_ = 0;
  long q_ = 0;

  std::vector<SparseDesign> designs_;  // one per eta candidate
  std::vector<BlockPlan> plans_;
  std::vector<std::int32_t> col2block_;  // 0-based block per column
  std::vector<std::int32_t> col2local_;  // q-local index per column
  std::vector<long> q_offset_;           // per resolution
  std::vector<long> pow_p_;              // P^(r-1)

  Eigen::LLT<Eigen::MatrixXd> xtx_llt_;

  Eigen::VectorXd gamma_;
  double sigma2_ = 1.0;
  Eigen::VectorXd beta_;
  ShrinkageState shrink_;
  int eta_ = 1;
  Eigen::VectorXd f_;  // K_eta beta, kept current within an iteration

  Eigen::MatrixXd f_cand_;  // per-candidate fitted values, refreshed each iteration
  Eigen::VectorXd f_snapshot_;
  std::vector<Eigen::VectorXd> jacobi_delta_;

  bool sigma2_fixed_ = false;
  bool gamma_frozen_ = false;
  bool deltas_frozen_ = false;
  bool flat_prior_ = false;
  double flat_prior_var_ = 1.0;
  std::vector<int> binary_targets_;

  mutable std::vector<Workspace> workspaces_;
  bool log_access_ = false;
  std::vector<std::vector<long>> access_log_;
};

ChainSamples run_chain(const Dataset& data, const MultiresGrid& grid, const Hyperparams& hyper,
                       const ChainConfig& cfg);

/// Chain driver over an already configured sampler (used by the probit chain
/// and by tests that pre-freeze parts of the state).
ChainSamples run_prepared_chain(GibbsSampler& sampler, const MultiresGrid& grid,
                                const Hyperparams& hyper, const ChainConfig& cfg, int p,
                                const std::string& family);

}  // namespace mdct
