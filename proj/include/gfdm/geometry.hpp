#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/rng.hpp"

namespace gfdm {

enum class NodeRole : std::uint8_t { interior, boundary };

inline const char* to_string(NodeRole role) {
  return role == NodeRole::interior ? "interior" : "boundary";
}

// Axis-aligned box in 1, 2, or 3 dimensions. Unused axes stay zero.
struct Domain {
  int dim = 1;
  std::array<double, 3> lower{};
  std::array<double, 3> upper{};

  Domain(int d, std::array<double, 3> lo, std::array<double, 3> hi)
      : dim(d), lower(lo), upper(hi) {
    if (dim < 1 || dim > 3)
      throw UnsupportedDimension("domain dimension must be 1, 2, or 3, got " +
                                 std::to_string(dim));
    for (int a = 0; a < dim; ++a) {
      if (!(std::isfinite(lower[a]) && std::isfinite(upper[a])))
        throw InvalidArgument("domain bounds must be finite");
      if (!(lower[a] < upper[a]))
        throw InvalidArgument("domain axis " + std::to_string(a) +
                              " needs lower < upper");
    }
    for (int a = dim; a < 3; ++a) {
      lower[a] = 0.0;
      upper[a] = 0.0;
    }
  }

  static Domain unit_box(int dim) {
    return Domain(dim, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  }

  double extent(int axis) const { return upper[axis] - lower[axis]; }

  double diagonal() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += extent(a) * extent(a);
    return std::sqrt(s);
  }

  bool contains(std::span<const double> x) const {
    for (int a = 0; a < dim; ++a)
      if (x[a] < lower[a] || x[a] > upper[a]) return false;
    return true;
  }

  // Distance from x to the nearest face, zero on the boundary.
  double face_distance(std::span<const double> x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim; ++a)
      d = std::min({d, std::abs(x[a] - lower[a]), std::abs(x[a] - upper[a])});
    return d;
  }
};

// Scattered nodes in a box, each flagged interior or boundary.
//
// Invariants, checked at construction:
//   - every node lies in the closed box,
//   - no two nodes coincide exactly,
//   - boundary-flagged nodes lie on a face (within a small tolerance),
//   - at least one node of each role.
class PointCloud {
 public:
  PointCloud(Domain domain, std::vector<double> coords,
             std::vector<NodeRole> roles)
      : domain_(domain), coords_(std::move(coords)), roles_(std::move(roles)) {
    validate();
    for (int i = 0; i < size(); ++i)
      if (roles_[static_cast<size_t>(i)] == NodeRole::interior)
        interior_.push_back(i);
  }

  int dim() const { return domain_.dim; }
  int size() const { return static_cast<int>(roles_.size()); }
  const Domain& domain() const { return domain_; }

  std::span<const double> position(int node) const {
    return {coords_.data() + static_cast<size_t>(node) * dim(),
            static_cast<size_t>(dim())};
  }

  double coord(int node, int axis) const {
    return coords_[static_cast<size_t>(node) * dim() + axis];
  }

  NodeRole role(int node) const { return roles_[static_cast<size_t>(node)]; }
  bool is_interior(int node) const { return role(node) == NodeRole::interior; }

  const std::vector<int>& interior_nodes() const { return interior_; }
  int interior_count() const { return static_cast<int>(interior_.size()); }
  int boundary_count() const { return size() - interior_count(); }

 private:
  void validate() const {
    const int d = dim();
    if (coords_.size() != roles_.size() * static_cast<size_t>(d))
      throw InvalidArgument("coordinate array length must be dim * node count");
    const int n = static_cast<int>(roles_.size());
    if (n < 1) throw DegenerateCloud("a cloud needs at least one node");

    double scale = 1.0;
    for (int a = 0; a < d; ++a) scale = std::max(scale, domain_.extent(a));
    const double face_tol = 1e-12 * scale;

    for (int i = 0; i < n; ++i) {
      const auto x = position(i);
      for (int a = 0; a < d; ++a)
        if (!std::isfinite(x[a]))
          throw DegenerateCloud("node " + std::to_string(i) +
                                " has a non-finite coordinate");
      if (!domain_.contains(x))
        throw DegenerateCloud("node " + std::to_string(i) +
                              " lies outside the domain box");
      if (roles_[static_cast<size_t>(i)] == NodeRole::boundary &&
          domain_.face_distance(x) > face_tol)
        throw DegenerateCloud("node " + std::to_string(i) +
                              " is flagged boundary but lies off every face");
    }

    // Duplicate scan via lexicographic sort of node indices: O(n log n).
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      for (int a = 0; a < d; ++a) {
        if (coord(i, a) < coord(j, a)) return true;
        if (coord(i, a) > coord(j, a)) return false;
      }
      return false;
    });
    for (int k = 1; k < n; ++k) {
      const int i = order[static_cast<size_t>(k - 1)];
      const int j = order[static_cast<size_t>(k)];
      bool same = true;
      for (int a = 0; a < d; ++a)
        if (coord(i, a) != coord(j, a)) same = false;
      if (same)
        throw DegenerateCloud("nodes " + std::to_string(std::min(i, j)) +
                              " and " + std::to_string(std::max(i, j)) +
                              " coincide");
    }
  }

  Domain domain_;
  std::vector<double> coords_;
  std::vector<NodeRole> roles_;
  std::vector<int> interior_;
};

namespace detail {

// k face positions along [lo, hi], endpoints included; the midpoint if k == 1.
inline std::vector<double> face_line(double lo, double hi, int k) {
  std::vector<double> xs;
  xs.reserve(static_cast<size_t>(k));
  if (k == 1) {
    xs.push_back(lo + 0.5 * (hi - lo));
    return xs;
  }
  for (int j = 0; j < k; ++j)
    xs.push_back(lo + (hi - lo) * (static_cast<double>(j) / (k - 1)));
  return xs;
}

inline void append_node(std::vector<double>& coords, std::vector<NodeRole>& roles,
                        std::span<const double> x, int dim, NodeRole role) {
  for (int a = 0; a < dim; ++a) coords.push_back(x[a]);
  roles.push_back(role);
}

inline bool same_point(std::span<const double> a, std::span<const double> b, int dim) {
  for (int i = 0; i < dim; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace detail

// Tensor-product grid with points_per_axis nodes along each axis; nodes on
// the box faces are boundary, the rest interior.
inline PointCloud generate_regular_grid(const Domain& domain, int points_per_axis) {
  const int d = domain.dim;
  const int n = points_per_axis;
  if (n < 3)
    throw InvalidArgument("a regular grid needs at least 3 points per axis so "
                          "interior nodes exist, got " + std::to_string(n));

  std::vector<double> coords;
  std::vector<NodeRole> roles;
  std::array<int, 3> idx{0, 0, 0};
  const long total = static_cast<long>(std::pow(static_cast<double>(n), d) + 0.5);
  coords.reserve(static_cast<size_t>(total) * d);
  roles.reserve(static_cast<size_t>(total));

  // Axis 0 varies fastest.
  while (true) {
    std::array<double, 3> x{};
    bool on_face = false;
    for (int a = 0; a < d; ++a) {
      x[a] = domain.lower[a] +
             domain.extent(a) * (static_cast<double>(idx[a]) / (n - 1));
      if (idx[a] == 0 || idx[a] == n - 1) on_face = true;
    }
    detail::append_node(coords, roles, {x.data(), static_cast<size_t>(d)}, d,
                        on_face ? NodeRole::boundary : NodeRole::interior);

    int a = 0;
    while (a < d && ++idx[a] == n) idx[a++] = 0;
    if (a == d) break;
  }
  return PointCloud(domain, std::move(coords), std::move(roles));
}

// Boundary layout for random clouds: nodes per face. 1D faces hold exactly
// one node each; in 2D a face carries a line of k nodes, in 3D a k-by-k grid.
struct BoundarySpec {
  int per_face = 0;

  static BoundarySpec uniform(int per_face) { return BoundarySpec{per_face}; }
};

// Random cloud: equispaced boundary nodes on every face (corners shared by
// adjacent faces are emitted once), plus n_interior uniform samples in the
// open box kept pairwise at least 0.1 * diagonal / N^(1/dim) apart by
// rejection. Gives up after 10 * N failed draws in a row budget-wise.
inline PointCloud generate_random_cloud(const Domain& domain, int n_interior,
                                        const BoundarySpec& boundary,
                                        std::uint64_t seed) {
  const int d = domain.dim;
  if (n_interior < 1)
    throw InvalidArgument("random cloud needs at least one interior node");
  const int k = boundary.per_face;
  if (k < 1)
    throw InvalidArgument("random cloud needs at least one boundary node per face");
  if (d == 1 && k != 1)
    throw InvalidArgument("a 1D face holds exactly one node, got per_face = " +
                          std::to_string(k));

  std::vector<double> coords;
  std::vector<NodeRole> roles;

  // Boundary first so indices of the deterministic part are stable.
  auto emit_unique = [&](std::span<const double> x) {
    const int n = static_cast<int>(roles.size());
    for (int i = 0; i < n; ++i) {
      std::span<const double> p{coords.data() + static_cast<size_t>(i) * d,
                                static_cast<size_t>(d)};
      if (detail::same_point(p, x, d)) return;
    }
    detail::append_node(coords, roles, x, d, NodeRole::boundary);
  };

  for (int axis = 0; axis < d; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double face_coord = side == 0 ? domain.lower[axis] : domain.upper[axis];
      if (d == 1) {
        std::array<double, 1> x{face_coord};
        emit_unique({x.data(), 1});
      } else if (d == 2) {
        const int other = 1 - axis;
        for (double t : detail::face_line(domain.lower[other], domain.upper[other], k)) {
          std::array<double, 2> x{};
          x[static_cast<size_t>(axis)] = face_coord;
          x[static_cast<size_t>(other)] = t;
          emit_unique({x.data(), 2});
        }
      } else {
        const int u = axis == 0 ? 1 : 0;
        const int v = axis == 2 ? 1 : 2;
        for (double tu : detail::face_line(domain.lower[u], domain.upper[u], k))
          for (double tv : detail::face_line(domain.lower[v], domain.upper[v], k)) {
            std::array<double, 3> x{};
            x[static_cast<size_t>(axis)] = face_coord;
            x[static_cast<size_t>(u)] = tu;
            x[static_cast<size_t>(v)] = tv;
            emit_unique({x.data(), 3});
          }
      }
    }
  }

  const int n_boundary = static_cast<int>(roles.size());
  const long n_total = static_cast<long>(n_boundary) + n_interior;
  const double d_min = 0.1 * domain.diagonal() /
                       std::pow(static_cast<double>(n_total), 1.0 / d);
  const double d_min_sq = d_min * d_min;

  NoiseStream rng(seed);
  const long budget = 10 * n_total;
  long attempts = 0;
  int accepted = 0;
  while (accepted < n_interior) {
    if (attempts >= budget)
      throw DegenerateCloud(
          "random cloud rejection sampling exhausted its budget of " +
          std::to_string(budget) + " draws after placing " +
          std::to_string(accepted) + " of " + std::to_string(n_interior) +
          " interior nodes; lower the node count or shrink the separation");
    ++attempts;

    std::array<double, 3> x{};
    bool open = true;
    for (int a = 0; a < d; ++a) {
      x[a] = domain.lower[a] + domain.extent(a) * rng.uniform01();
      if (x[a] <= domain.lower[a] || x[a] >= domain.upper[a]) open = false;
    }
    if (!open) continue;

    bool clear = true;
    const int n_now = static_cast<int>(roles.size());
    for (int i = 0; i < n_now && clear; ++i) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        const double dx = coords[static_cast<size_t>(i) * d + a] - x[a];
        s += dx * dx;
      }
      if (s < d_min_sq) clear = false;
    }
    if (!clear) continue;

    detail::append_node(coords, roles, {x.data(), static_cast<size_t>(d)}, d,
                        NodeRole::interior);
    ++accepted;
  }

  return PointCloud(domain, std::move(coords), std::move(roles));
}

// 1D refinement: insert the midpoint of every gap between x-sorted nodes.
// N nodes become 2N - 1; inserted nodes are interior, originals keep roles.
inline PointCloud refine_midpoints(const PointCloud& cloud) {
  if (cloud.dim() != 1)
    throw UnsupportedDimension("midpoint refinement is defined in 1D only");

  const int n = cloud.size();
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return cloud.coord(i, 0) < cloud.coord(j, 0); });

  std::vector<double> coords;
  std::vector<NodeRole> roles;
  coords.reserve(static_cast<size_t>(2 * n - 1));
  roles.reserve(static_cast<size_t>(2 * n - 1));
  for (int k = 0; k < n; ++k) {
    const int i = order[static_cast<size_t>(k)];
    if (k > 0) {
      const int prev = order[static_cast<size_t>(k - 1)];
      coords.push_back(0.5 * (cloud.coord(prev, 0) + cloud.coord(i, 0)));
      roles.push_back(NodeRole::interior);
    }
    coords.push_back(cloud.coord(i, 0));
    roles.push_back(cloud.role(i));
  }
  return PointCloud(cloud.domain(), std::move(coords), std::move(roles));
}

}  // namespace gfdm
