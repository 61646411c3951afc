#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mdct {

/// Spatial location; the second coordinate is ignored in 1D.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double sq_dist(const Point& a, const Point& b, int dim) {
  const double dx = a.x - b.x;
  if (dim == 1) return dx * dx;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct DomainBox {
  int dim = 1;              // 1 or 2
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  bool contains(const Point& s) const;
};

/// Node of the partition tree: within-resolution index j (1-based) at
/// resolution r (1..R). Children of node k at resolution r occupy indices
/// (k-1)P+1 .. kP at resolution r+1.
struct TreeIndex {
  long j = 1;
  int r = 1;
  friend bool operator==(const TreeIndex&, const TreeIndex&) = default;
};

enum class NeighborhoodKind { blocks, data };

/// Recursive rectangular partition with knots at cell centers. Immutable
/// after construction; safe to share read-only across workers.
class MultiresGrid {
 public:
  DomainBox box;
  int R = 1;
  std::array<int, 2> J1{1, 1};  // knots per axis at resolution 1 (J1[1]=1 in 1D)
  int P = 2;                    // children per node, 2^dim

  // Per resolution r (0-indexed as r-1):
  std::vector<std::array<long, 2>> n_axis;       // lattice extent per axis
  std::vector<std::array<double, 2>> spacing;    // knot spacing per axis
  std::vector<std::vector<Point>> knots;         // tree order
  std::vector<std::vector<long>> tree_of_lattice;  // lattice row-major -> tree index (0-based)
  std::vector<std::vector<long>> lattice_of_tree;  // inverse

  std::vector<long> J;           // knots per resolution
  std::vector<long> node_offset; // prefix sums; node_offset[R] = total node count
  long total_nodes = 0;

  int dim() const { return box.dim; }
  long J_at(int r) const { return J[static_cast<std::size_t>(r - 1)]; }

  /// Largest per-axis knot spacing at resolution r (anisotropy-safe scale).
  double max_spacing(int r) const;

  /// Linear node id (resolution-major, tree order within resolution).
  long node_id(TreeIndex idx) const {
    return node_offset[static_cast<std::size_t>(idx.r - 1)] + (idx.j - 1);
  }
  TreeIndex node_from_id(long id) const;

  const Point& knot(TreeIndex idx) const {
    return knots[static_cast<std::size_t>(idx.r - 1)][static_cast<std::size_t>(idx.j - 1)];
  }

  /// Resolution-1 ancestor block (1-based) of any node.
  long block_of(TreeIndex idx) const;

  long subtree_size(int r) const;  // (P^(R-r+1)-1)/(P-1)
};

MultiresGrid build_grid(const DomainBox& box, int R, std::array<int, 2> J1);

TreeIndex father(TreeIndex idx, int P);

std::vector<TreeIndex> subtree(TreeIndex idx, const MultiresGrid& grid);

/// Visits subtree nodes top-down (by resolution, contiguous j ranges).
template <class F>
void for_each_subtree_node(TreeIndex root, const MultiresGrid& grid, F&& f) {
  long first = root.j - 1;  // 0-based
  long count = 1;
  for (int r = root.r; r <= grid.R; ++r) {
    for (long k = 0; k < count; ++k) {
      f(TreeIndex{first + k + 1, r});
    }
    first *= grid.P;
    count *= grid.P;
  }
}

/// N(m) = {j : ||s_j^1 - s_m^1|| < 2*eta*D1} or N_D(m) = {i : ||s_i - s_m^1|| < eta*D1}
/// with D1 the resolution-1 knot spacing; eta thresholds are in spacing units.
std::vector<long> neighborhood(long m, double eta, const MultiresGrid& grid,
                               NeighborhoodKind kind,
                               const std::vector<Point>* locations = nullptr);

/// Cell of resolution r containing s. Cells are half-open [low, high) per
/// axis with the last cell closed.
TreeIndex locate(const Point& s, const MultiresGrid& grid, int r);

}  // namespace mdct
