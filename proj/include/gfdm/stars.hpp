#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"
#include "gfdm/parallel.hpp"

namespace gfdm {

// Neighborhood of one interior node: the M nodes nearest to the center,
// stored with offsets relative to the center. Sorted by distance; exact
// distance ties break toward the lower node index so star construction is a
// pure function of the cloud.
struct Star {
  int center = -1;
  int dim = 0;
  std::vector<int> neighbors;
  std::vector<std::array<double, 3>> offsets;  // neighbor minus center
  std::vector<double> distances;               // nondecreasing
  double radius = 0.0;                         // distances.back()

  int size() const { return static_cast<int>(neighbors.size()); }
};

struct StarSet {
  std::vector<Star> stars;  // ascending center index, one per interior node
  double max_radius = 0.0;  // largest star radius in the cloud
};

inline Star build_star(const PointCloud& cloud, int center, int star_size) {
  if (center < 0 || center >= cloud.size())
    throw InvalidArgument("star center " + std::to_string(center) +
                          " is out of range");
  if (!cloud.is_interior(center))
    throw InvalidArgument("node " + std::to_string(center) +
                          " is a boundary node; stars are built for interior "
                          "nodes only");
  if (star_size < 1)
    throw InvalidArgument("star size must be positive, got " +
                          std::to_string(star_size));
  if (star_size >= cloud.size())
    throw InvalidArgument("star size " + std::to_string(star_size) +
                          " needs at least " + std::to_string(star_size + 1) +
                          " nodes, cloud has " + std::to_string(cloud.size()));

  const int d = cloud.dim();
  const auto xc = cloud.position(center);

  struct Candidate {
    double dist_sq;
    int node;
    bool operator<(const Candidate& o) const {
      return dist_sq != o.dist_sq ? dist_sq < o.dist_sq : node < o.node;
    }
  };

  std::vector<Candidate> all;
  all.reserve(static_cast<size_t>(cloud.size() - 1));
  for (int j = 0; j < cloud.size(); ++j) {
    if (j == center) continue;
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      const double dx = cloud.coord(j, a) - xc[a];
      s += dx * dx;
    }
    all.push_back({s, j});
  }

  std::nth_element(all.begin(), all.begin() + (star_size - 1), all.end());
  all.resize(static_cast<size_t>(star_size));
  std::sort(all.begin(), all.end());

  Star star;
  star.center = center;
  star.dim = d;
  star.neighbors.reserve(all.size());
  star.offsets.reserve(all.size());
  star.distances.reserve(all.size());
  for (const auto& c : all) {
    star.neighbors.push_back(c.node);
    std::array<double, 3> off{};
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      off[static_cast<size_t>(a)] = cloud.coord(c.node, a) - xc[a];
      s += off[static_cast<size_t>(a)] * off[static_cast<size_t>(a)];
    }
    star.offsets.push_back(off);
    star.distances.push_back(std::sqrt(s));
  }
  star.radius = star.distances.back();
  return star;
}

// Stars for every interior node. Built in parallel; the result is a pure
// function of (cloud, star_size) regardless of worker count.
inline StarSet build_all_stars(const PointCloud& cloud, int star_size,
                               int workers = 0) {
  const auto& centers = cloud.interior_nodes();
  StarSet set;
  set.stars.resize(centers.size());
  parallel_for(static_cast<int>(centers.size()), workers, [&](int i) {
    set.stars[static_cast<size_t>(i)] =
        build_star(cloud, centers[static_cast<size_t>(i)], star_size);
  });
  for (const auto& s : set.stars) set.max_radius = std::max(set.max_radius, s.radius);
  return set;
}

// Default star size by dimension: 1D pairs of side neighbors, 2D the
// classical 8-point star, 3D the 26-point box neighborhood.
inline int default_star_size(int dim) {
  switch (dim) {
    case 1: return 4;
    case 2: return 8;
    case 3: return 26;
    default:
      throw UnsupportedDimension("no default star size for dimension " +
                                 std::to_string(dim));
  }
}

}  // namespace gfdm
