#pragma once

#include <utility>
#include <vector>

#include "mdct/grid.hpp"
#include "mdct/rng.hpp"

namespace mdct {

/// Multiscale tree shrinkage prior state: one global delta1, one delta per
/// node of resolution >= 2, and the cached per-node variances
///   alpha_j^1 = 1/delta1,  alpha_j^r = alpha_father / delta_{j,r}.
/// The cache is always maintained with exactly that formula (top-down), so it
/// is bit-identical to a from-scratch recomputation.
struct ShrinkageState {
  double c = 3.0;          // Gamma shape for delta_{j,r}, must exceed 2
  double delta1 = 2.0;
  std::vector<double> delta;  // indexed by node id; resolution-1 slots unused (1.0)
  std::vector<double> alpha;  // indexed by node id
};

ShrinkageState make_shrinkage_state(const MultiresGrid& grid, double c);

/// Path-product evaluation of alpha at one node (independent of the cache).
double alpha_of(TreeIndex idx, const ShrinkageState& state, const MultiresGrid& grid);

void recompute_alpha_full(ShrinkageState& state, const MultiresGrid& grid);
void recompute_alpha_subtree(ShrinkageState& state, const MultiresGrid& grid, TreeIndex root);

/// delta1 ~ Gamma(2,1), delta_{j,r} ~ Gamma(c,1), beta_j^r ~ N(0, alpha_j^r).
std::pair<ShrinkageState, std::vector<double>> draw_prior(const MultiresGrid& grid,
                                                          double c, Rng& rng);

struct GammaParams {
  double shape = 0.0;
  double rate = 0.0;
};

/// Full-conditional parameters; exposed so tests can check conjugacy directly.
/// beta points at all node coefficients in node-id order.
GammaParams delta1_conditional(const double* beta, const ShrinkageState& state,
                               const MultiresGrid& grid);
GammaParams delta_jr_conditional(TreeIndex idx, const double* beta,
                                 const ShrinkageState& state, const MultiresGrid& grid);

double update_delta1(const double* beta, ShrinkageState& state, const MultiresGrid& grid,
                     Rng& rng);
double update_delta_jr(TreeIndex idx, const double* beta, ShrinkageState& state,
                       const MultiresGrid& grid, Rng& rng);

}  // namespace mdct
