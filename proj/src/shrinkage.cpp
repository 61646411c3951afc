#include "mdct/shrinkage.hpp"

#include <cmath>

#include "mdct/errors.hpp"

namespace mdct {

ShrinkageState make_shrinkage_state(const MultiresGrid& grid, double c) {
  if (!(c > 2.0)) throw config_error("shrinkage shape c must exceed 2");
  ShrinkageState state;
  state.c = c;
  state.delta1 = 2.0;  // prior mean of Gamma(2,1)
  state.delta.assign(static_cast<std::size_t>(grid.total_nodes), 1.0);
  for (long id = grid.J_at(1); id < grid.total_nodes; ++id) {
    state.delta[static_cast<std::size_t>(id)] = c;  // prior mean of Gamma(c,1)
  }
  state.alpha.assign(static_cast<std::size_t>(grid.total_nodes), 0.0);
  recompute_alpha_full(state, grid);
  return state;
}

double alpha_of(TreeIndex idx, const ShrinkageState& state, const MultiresGrid& grid) {
  double a = 1.0 / state.delta1;
  // Multiply the path factors top-down to match the cache arithmetic.
  std::vector<long> path;
  TreeIndex node = idx;
  while (node.r >= 2) {
    path.push_back(grid.node_id(node));
    node = father(node, grid.P);
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    a /= state.delta[static_cast<std::size_t>(*it)];
  }
  return a;
}

void recompute_alpha_full(ShrinkageState& state, const MultiresGrid& grid) {
  for (long j = 0; j < grid.J_at(1); ++j) {
    state.alpha[static_cast<std::size_t>(j)] = 1.0 / state.delta1;
  }
  for (int r = 2; r <= grid.R; ++r) {
    const long base = grid.node_offset[static_cast<std::size_t>(r - 1)];
    const long parent_base = grid.node_offset[static_cast<std::size_t>(r - 2)];
    for (long j = 0; j < grid.J_at(r); ++j) {
      const long id = base + j;
      const long parent = parent_base + j / grid.P;
      state.alpha[static_cast<std::size_t>(id)] =
          state.alpha[static_cast<std::size_t>(parent)] / state.delta[static_cast<std::size_t>(id)];
    }
  }
}

void recompute_alpha_subtree(ShrinkageState& state, const MultiresGrid& grid, TreeIndex root) {
  for_each_subtree_node(root, grid, [&](TreeIndex node) {
    const long id = grid.node_id(node);
    if (node.r == 1) {
      state.alpha[static_cast<std::size_t>(id)] = 1.0 / state.delta1;
    } else {
      const long parent = grid.node_id(father(node, grid.P));
      state.alpha[static_cast<std::size_t>(id)] =
          state.alpha[static_cast<std::size_t>(parent)] / state.delta[static_cast<std::size_t>(id)];
    }
  });
}

std::pair<ShrinkageState, std::vector<double>> draw_prior(const MultiresGrid& grid, double c,
                                                          Rng& rng) {
  if (!(c > 2.0)) throw config_error("shrinkage shape c must exceed 2");
  ShrinkageState state;
  state.c = c;
  state.delta1 = rng.gamma(2.0, 1.0);
  state.delta.assign(static_cast<std::size_t>(grid.total_nodes), 1.0);
  for (long id = grid.J_at(1); id < grid.total_nodes; ++id) {
    state.delta[static_cast<std::size_t>(id)] = rng.gamma(c, 1.0);
  }
  state.alpha.assign(static_cast<std::size_t>(grid.total_nodes), 0.0);
  recompute_alpha_full(state, grid);

  std::vector<double> beta(static_cast<std::size_t>(grid.total_nodes));
  for (long id = 0; id < grid.total_nodes; ++id) {
    beta[static_cast<std::size_t>(id)] =
        std::sqrt(state.alpha[static_cast<std::size_t>(id)]) * rng.normal();
  }
  return {std::move(state), std::move(beta)};
}

GammaParams delta1_conditional(const double* beta, const ShrinkageState& state,
                               const MultiresGrid& grid) {
  // beta_j^r | delta has variance alpha = (1/delta1) * alpha_{j,r,-1}, so the
  // Gamma(2,1) prior is conjugate with shape 2 + N/2.
  GammaParams p;
  p.shape = 2.0 + 0.5 * static_cast<double>(grid.total_nodes);
  double acc = 0.0;
  for (long id = 0; id < grid.total_nodes; ++id) {
    const double b = beta[id];
    acc += b * b / (state.alpha[static_cast<std::size_t>(id)] * state.delta1);
  }
  p.rate = 1.0 + 0.5 * acc;
  if (!std::isfinite(p.rate)) throw numeric_error("non-finite rate in delta1 update");
  return p;
}

GammaParams delta_jr_conditional(TreeIndex idx, const double* beta,
                                 const ShrinkageState& state, const MultiresGrid& grid) {
  if (idx.r < 2) throw config_error("delta_{j,r} update requires r >= 2; use update_delta1");
  const double own = state.delta[static_cast<std::size_t>(grid.node_id(idx))];
  GammaParams p;
  p.shape = state.c + 0.5 * static_cast<double>(grid.subtree_size(idx.r));
  double acc = 0.0;
  for_each_subtree_node(idx, grid, [&](TreeIndex node) {
    const long id = grid.node_id(node);
    const double b = beta[id];
    acc += b * b / (state.alpha[static_cast<std::size_t>(id)] * own);
  });
  p.rate = 1.0 + 0.5 * acc;
  if (!std::isfinite(p.rate)) throw numeric_error("non-finite rate in delta update");
  return p;
}

double update_delta1(const double* beta, ShrinkageState& state, const MultiresGrid& grid,
                     Rng& rng) {
  const GammaParams p = delta1_conditional(beta, state, grid);
  state.delta1 = rng.gamma(p.shape, p.rate);
  recompute_alpha_full(state, grid);
  return state.delta1;
}

double update_delta_jr(TreeIndex idx, const double* beta, ShrinkageState& state,
                       const MultiresGrid& grid, Rng& rng) {
  const GammaParams p = delta_jr_conditional(idx, beta, state, grid);
  const double draw = rng.gamma(p.shape, p.rate);
  state.delta[static_cast<std::size_t>(grid.node_id(idx))] = draw;
  recompute_alpha_subtree(state, grid, idx);
  return draw;
}

}  // namespace mdct
