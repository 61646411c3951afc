#include "mdct/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdct/errors.hpp"

namespace mdct {

bool DomainBox::contains(const Point& s) const {
  if (s.x < lo[0] || s.x > hi[0]) return false;
  if (dim == 2 && (s.y < lo[1] || s.y > hi[1])) return false;
  return true;
}

double MultiresGrid::max_spacing(int r) const {
  const auto& sp = spacing[static_cast<std::size_t>(r - 1)];
  return dim() == 1 ? sp[0] : std::max(sp[0], sp[1]);
}

TreeIndex MultiresGrid::node_from_id(long id) const {
  for (int r = 1; r <= R; ++r) {
    if (id < node_offset[static_cast<std::size_t>(r)]) {
      return TreeIndex{id - node_offset[static_cast<std::size_t>(r - 1)] + 1, r};
    }
  }
  throw config_error("node id out of range");
}

long MultiresGrid::block_of(TreeIndex idx) const {
  long j0 = idx.j - 1;
  for (int r = idx.r; r > 1; --r) j0 /= P;
  return j0 + 1;
}

long MultiresGrid::subtree_size(int r) const {
  long size = 0;
  long level = 1;
  for (int l = r; l <= R; ++l) {
    size += level;
    level *= P;
  }
  return size;
}

MultiresGrid build_grid(const DomainBox& box, int R, std::array<int, 2> J1) {
  if (box.dim != 1 && box.dim != 2) {
    throw config_error("domain dimension must be 1 or 2");
  }
  for (int a = 0; a < box.dim; ++a) {
    if (!(box.lo[static_cast<std::size_t>(a)] < box.hi[static_cast<std::size_t>(a)])) {
      throw config_error("domain box must have lower < upper on every axis");
    }
  }
  if (R < 1) throw config_error("resolution count must be >= 1");
  if (J1[0] < 1 || (box.dim == 2 && J1[1] < 1)) {
    throw config_error("resolution-1 knot counts must be >= 1");
  }

  MultiresGrid g;
  g.box = box;
  g.R = R;
  g.J1 = J1;
  if (box.dim == 1) g.J1[1] = 1;
  g.P = box.dim == 1 ? 2 : 4;

  const int d = box.dim;
  g.n_axis.resize(static_cast<std::size_t>(R));
  g.spacing.resize(static_cast<std::size_t>(R));
  g.knots.resize(static_cast<std::size_t>(R));
  g.tree_of_lattice.resize(static_cast<std::size_t>(R));
  g.lattice_of_tree.resize(static_cast<std::size_t>(R));
  g.J.resize(static_cast<std::size_t>(R));
  g.node_offset.assign(static_cast<std::size_t>(R) + 1, 0);

  for (int r = 1; r <= R; ++r) {
    const std::size_t ri = static_cast<std::size_t>(r - 1);
    const long scale = 1L << (r - 1);
    g.n_axis[ri] = {g.J1[0] * scale, d == 2 ? g.J1[1] * scale : 1};
    g.spacing[ri][0] = (box.hi[0] - box.lo[0]) / static_cast<double>(g.n_axis[ri][0]);
    g.spacing[ri][1] =
        d == 2 ? (box.hi[1] - box.lo[1]) / static_cast<double>(g.n_axis[ri][1]) : 0.0;
    g.J[ri] = g.n_axis[ri][0] * g.n_axis[ri][1];
    g.node_offset[static_cast<std::size_t>(r)] = g.node_offset[ri] + g.J[ri];
  }
  g.total_nodes = g.node_offset[static_cast<std::size_t>(R)];

  // Resolution 1: tree order is lattice row-major order.
  {
    const std::size_t ri = 0;
    const long nx = g.n_axis[ri][0];
    const long ny = g.n_axis[ri][1];
    g.lattice_of_tree[ri].resize(static_cast<std::size_t>(g.J[ri]));
    g.tree_of_lattice[ri].resize(static_cast<std::size_t>(g.J[ri]));
    for (long k = 0; k < nx * ny; ++k) {
      g.lattice_of_tree[ri][static_cast<std::size_t>(k)] = k;
      g.tree_of_lattice[ri][static_cast<std::size_t>(k)] = k;
    }
  }
  // Finer resolutions: children of tree node k, in row-major order within the
  // split, occupy tree indices kP .. kP+P-1 (0-based).
  for (int r = 2; r <= R; ++r) {
    const std::size_t ri = static_cast<std::size_t>(r - 1);
    const long nx = g.n_axis[ri][0];
    g.lattice_of_tree[ri].resize(static_cast<std::size_t>(g.J[ri]));
    g.tree_of_lattice[ri].resize(static_cast<std::size_t>(g.J[ri]));
    const auto& parent_lattice = g.lattice_of_tree[ri - 1];
    const long parent_nx = g.n_axis[ri - 1][0];
    for (long k = 0; k < g.J[ri - 1]; ++k) {
      const long pl = parent_lattice[static_cast<std::size_t>(k)];
      const long px = pl % parent_nx;
      const long py = pl / parent_nx;
      for (int c = 0; c < g.P; ++c) {
        const long cx = 2 * px + (c & 1);
        const long cy = d == 2 ? 2 * py + (c >> 1) : 0;
        const long lattice = cy * nx + cx;
        const long tree = k * g.P + c;
        g.lattice_of_tree[ri][static_cast<std::size_t>(tree)] = lattice;
        g.tree_of_lattice[ri][static_cast<std::size_t>(lattice)] = tree;
      }
    }
  }

  for (int r = 1; r <= R; ++r) {
    const std::size_t ri = static_cast<std::size_t>(r - 1);
    const long nx = g.n_axis[ri][0];
    g.knots[ri].resize(static_cast<std::size_t>(g.J[ri]));
    for (long t = 0; t < g.J[ri]; ++t) {
      const long l = g.lattice_of_tree[ri][static_cast<std::size_t>(t)];
      const long ix = l % nx;
      const long iy = l / nx;
      Point knot;
      knot.x = box.lo[0] + (static_cast<double>(ix) + 0.5) * g.spacing[ri][0];
      knot.y = d == 2 ? box.lo[1] + (static_cast<double>(iy) + 0.5) * g.spacing[ri][1] : 0.0;
      g.knots[ri][static_cast<std::size_t>(t)] = knot;
    }
  }
  return g;
}

TreeIndex father(TreeIndex idx, int P) {
  if (idx.r < 2) {
    throw config_error("resolution-1 nodes have no father");
  }
  return TreeIndex{(idx.j - 1) / P + 1, idx.r - 1};
}

std::vector<TreeIndex> subtree(TreeIndex idx, const MultiresGrid& grid) {
  std::vector<TreeIndex> nodes;
  nodes.reserve(static_cast<std::size_t>(grid.subtree_size(idx.r)));
  for_each_subtree_node(idx, grid, [&](TreeIndex node) { nodes.push_back(node); });
  return nodes;
}

std::vector<long> neighborhood(long m, double eta, const MultiresGrid& grid,
                               NeighborhoodKind kind, const std::vector<Point>* locations) {
  if (m < 1 || m > grid.J_at(1)) {
    throw config_error("block index out of range: " + std::to_string(m));
  }
  const double d1 = grid.max_spacing(1);
  const Point& center = grid.knot(TreeIndex{m, 1});
  std::vector<long> out;
  if (kind == NeighborhoodKind::blocks) {
    const double radius2 = 2.0 * eta * d1 * 2.0 * eta * d1;
    for (long j = 1; j <= grid.J_at(1); ++j) {
      if (sq_dist(grid.knot(TreeIndex{j, 1}), center, grid.dim()) < radius2) {
        out.push_back(j);
      }
    }
  } else {
    if (locations == nullptr) {
      throw config_error("data neighborhood requires locations");
    }
    const double radius2 = eta * d1 * eta * d1;
    for (long i = 0; i < static_cast<long>(locations->size()); ++i) {
      if (sq_dist((*locations)[static_cast<std::size_t>(i)], center, grid.dim()) < radius2) {
        out.push_back(i);
      }
    }
  }
  return out;
}

TreeIndex locate(const Point& s, const MultiresGrid& grid, int r) {
  if (r < 1 || r > grid.R) throw config_error("resolution out of range");
  if (!grid.box.contains(s)) {
    throw data_error("location outside the domain box");
  }
  const std::size_t ri = static_cast<std::size_t>(r - 1);
  const long nx = grid.n_axis[ri][0];
  const long ny = grid.n_axis[ri][1];
  long ix = static_cast<long>(std::floor((s.x - grid.box.lo[0]) / grid.spacing[ri][0]));
  ix = std::clamp(ix, 0L, nx - 1);
  long iy = 0;
  if (grid.dim() == 2) {
    iy = static_cast<long>(std::floor((s.y - grid.box.lo[1]) / grid.spacing[ri][1]));
    iy = std::clamp(iy, 0L, ny - 1);
  }
  return TreeIndex{grid.tree_of_lattice[ri][static_cast<std::size_t>(iy * nx + ix)] + 1, r};
}

}  // namespace mdct
