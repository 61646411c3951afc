#pragma once

#include <cstdint>
#include <vector>

#include "mdct/grid.hpp"

namespace mdct {

/// Wendland polynomial order for dimension d: l = floor(d/2) + 2, the minimal
/// degree giving a positive definite C^2 kernel in that dimension.
inline int wendland_order(int dim) { return dim / 2 + 2; }

/// kappa(z) = (1-z)_+^{l+1} (1 + (l+1) z); exactly 0 for z >= 1.
double wendland(double z, int l);

/// kappa(||s - knot|| / phi).
double kernel_eval(const Point& s, const Point& knot, double phi, int l, int dim);

struct KernelConfig {
  int dim = 1;
  int l = 2;
  double eta = 1.0;
  std::vector<double> phi;  // per resolution, strictly decreasing
};

KernelConfig make_kernel_config(const MultiresGrid& grid, double eta);

/// Row-sparse basis matrix over all resolutions. Columns are in node-id
/// order (resolution-major, tree order within resolution), so each
/// resolution-1 subtree owns one contiguous column range per resolution.
struct SparseDesign {
  long n_rows = 0;
  long n_cols = 0;
  double eta = 0.0;
  std::vector<std::int64_t> row_ptr;  // size n_rows+1
  std::vector<std::int32_t> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }

  double row_dot(long i, const double* beta) const {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[static_cast<std::size_t>(i)];
         k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      acc += val[static_cast<std::size_t>(k)] *
             beta[col[static_cast<std::size_t>(k)]];
    }
    return acc;
  }
};

SparseDesign build_design(const std::vector<Point>& locations, const MultiresGrid& grid,
                          double eta, int workers = 1);

/// Sparse row of the design for one location (prediction-time helper).
std::vector<std::pair<std::int32_t, double>> design_row(const Point& s,
                                                        const MultiresGrid& grid,
                                                        double eta);

}  // namespace mdct
