#include "mdct/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "mdct/errors.hpp"
#include "mdct/parallel.hpp"

namespace mdct {

double wendland(double z, int l) {
  if (z < 0.0) throw numeric_error("wendland kernel argument must be nonnegative");
  if (z >= 1.0) return 0.0;
  const double base = 1.0 - z;
  double p = base;
  for (int k = 0; k < l; ++k) p *= base;  // (1-z)^{l+1}
  return p * (1.0 + (l + 1) * z);
}

double kernel_eval(const Point& s, const Point& knot, double phi, int l, int dim) {
  if (!(phi > 0.0)) throw numeric_error("kernel bandwidth must be positive");
  return wendland(std::sqrt(sq_dist(s, knot, dim)) / phi, l);
}

KernelConfig make_kernel_config(const MultiresGrid& grid, double eta) {
  if (!(eta > 0.0)) throw config_error("eta must be positive");
  KernelConfig cfg;
  cfg.dim = grid.dim();
  cfg.l = wendland_order(cfg.dim);
  cfg.eta = eta;
  cfg.phi.resize(static_cast<std::size_t>(grid.R));
  for (int r = 1; r <= grid.R; ++r) {
    cfg.phi[static_cast<std::size_t>(r - 1)] = eta * grid.max_spacing(r);
  }
  return cfg;
}

namespace {

// Appends all nonzero (column, value) pairs for location s at resolution r.
// Knots live on a regular lattice, so the candidate window is a per-axis
// index range around s.
template <class Sink>
void row_entries_at_resolution(const Point& s, const MultiresGrid& grid,
                               const KernelConfig& cfg, int r, Sink&& sink) {
  const std::size_t ri = static_cast<std::size_t>(r - 1);
  const double phi = cfg.phi[ri];
  const long nx = grid.n_axis[ri][0];
  const long ny = grid.n_axis[ri][1];
  const double dx = grid.spacing[ri][0];
  const double lox = grid.box.lo[0];

  auto axis_range = [](double coord, double lo, double sp, double radius, long n,
                       long& first, long& last) {
    first = static_cast<long>(std::ceil((coord - radius - lo) / sp - 0.5));
    last = static_cast<long>(std::floor((coord + radius - lo) / sp - 0.5));
    first = std::max(first, 0L);
    last = std::min(last, n - 1);
  };

  long x0, x1;
  axis_range(s.x, lox, dx, phi, nx, x0, x1);
  const long col_base = grid.node_offset[ri];

  if (grid.dim() == 1) {
    for (long ix = x0; ix <= x1; ++ix) {
      const double cx = lox + (static_cast<double>(ix) + 0.5) * dx;
      const double z = std::fabs(s.x - cx) / phi;
      if (z < 1.0) {
        sink(static_cast<std::int32_t>(col_base + grid.tree_of_lattice[ri][static_cast<std::size_t>(ix)]),
             wendland(z, cfg.l));
      }
    }
    return;
  }

  const double dy = grid.spacing[ri][1];
  const double loy = grid.box.lo[1];
  long y0, y1;
  axis_range(s.y, loy, dy, phi, ny, y0, y1);
  for (long iy = y0; iy <= y1; ++iy) {
    const double cy = loy + (static_cast<double>(iy) + 0.5) * dy;
    const double dy2 = (s.y - cy) * (s.y - cy);
    for (long ix = x0; ix <= x1; ++ix) {
      const double cx = lox + (static_cast<double>(ix) + 0.5) * dx;
      const double dist = std::sqrt((s.x - cx) * (s.x - cx) + dy2);
      const double z = dist / phi;
      if (z < 1.0) {
        sink(static_cast<std::int32_t>(
                 col_base + grid.tree_of_lattice[ri][static_cast<std::size_t>(iy * nx + ix)]),
             wendland(z, cfg.l));
      }
    }
  }
}

}  // namespace

std::vector<std::pair<std::int32_t, double>> design_row(const Point& s,
                                                        const MultiresGrid& grid,
                                                        double eta) {
  const KernelConfig cfg = make_kernel_config(grid, eta);
  std::vector<std::pair<std::int32_t, double>> row;
  for (int r = 1; r <= grid.R; ++r) {
    row_entries_at_resolution(s, grid, cfg, r, [&](std::int32_t c, double v) {
      row.emplace_back(c, v);
    });
  }
  return row;
}

SparseDesign build_design(const std::vector<Point>& locations, const MultiresGrid& grid,
                          double eta, int workers) {
  const KernelConfig cfg = make_kernel_config(grid, eta);
  const long n = static_cast<long>(locations.size());
  for (const Point& s : locations) {
    if (!grid.box.contains(s)) {
      throw data_error("design location outside the domain box");
    }
  }

  SparseDesign design;
  design.n_rows = n;
  design.n_cols = grid.total_nodes;
  design.eta = eta;
  design.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

  // Pass 1: count nonzeros per row.
  for_chunks(n, workers, [&](std::int64_t b, std::int64_t e, std::int64_t) {
    for (std::int64_t i = b; i < e; ++i) {
      std::int64_t count = 0;
      for (int r = 1; r <= grid.R; ++r) {
        row_entries_at_resolution(locations[static_cast<std::size_t>(i)], grid, cfg, r,
                                  [&](std::int32_t, double) { ++count; });
      }
      design.row_ptr[static_cast<std::size_t>(i) + 1] = count;
    }
  });
  for (long i = 0; i < n; ++i) {
    design.row_ptr[static_cast<std::size_t>(i) + 1] += design.row_ptr[static_cast<std::size_t>(i)];
  }

  design.col.resize(static_cast<std::size_t>(design.row_ptr[static_cast<std::size_t>(n)]));
  design.val.resize(design.col.size());

  // Pass 2: fill.
  for_chunks(n, workers, [&](std::int64_t b, std::int64_t e, std::int64_t) {
    for (std::int64_t i = b; i < e; ++i) {
      std::int64_t k = design.row_ptr[static_cast<std::size_t>(i)];
      for (int r = 1; r <= grid.R; ++r) {
        row_entries_at_resolution(locations[static_cast<std::size_t>(i)], grid, cfg, r,
                                  [&](std::int32_t c, double v) {
                                    design.col[static_cast<std::size_t>(k)] = c;
                                    design.val[static_cast<std::size_t>(k)] = v;
                                    ++k;
                                  });
      }
    }
  });
  return design;
}

}  // namespace mdct
