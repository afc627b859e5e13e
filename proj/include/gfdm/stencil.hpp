#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/linalg.hpp"
#include "gfdm/parallel.hpp"
#include "gfdm/stars.hpp"
#include "gfdm/weights.hpp"

namespace gfdm {

// Number of Taylor coefficients recovered per star: all first and second
// partial derivatives.
inline int moment_size(int dim) {
  switch (dim) {
    case 1: return 2;
    case 2: return 5;
    case 3: return 9;
    default:
      throw UnsupportedDimension("moment system defined for dimensions 1-3, got " +
                                 std::to_string(dim));
  }
}

// Rows of the derivative vector holding pure second derivatives, i.e. the
// ones whose coefficients sum to the Laplacian.
inline std::span<const int> laplacian_rows(int dim) {
  static constexpr std::array<int, 1> rows1{1};
  static constexpr std::array<int, 2> rows2{2, 3};
  static constexpr std::array<int, 3> rows3{3, 4, 5};
  switch (dim) {
    case 1: return rows1;
    case 2: return rows2;
    case 3: return rows3;
    default:
      throw UnsupportedDimension("Laplacian rows defined for dimensions 1-3");
  }
}

// Taylor basis row for the offset (p, q, r). Derivative ordering:
//   1D: [x, xx]
//   2D: [x, y, xx, yy, xy]
//   3D: [x, y, z, xx, yy, zz, xy, xz, yz]
// Second-derivative columns carry the 1/2 from the Taylor expansion; mixed
// columns the plain product.
inline std::array<double, kMaxMomentSize> basis_row(int dim,
                                                    const std::array<double, 3>& off) {
  const double p = off[0], q = off[1], r = off[2];
  std::array<double, kMaxMomentSize> a{};
  switch (dim) {
    case 1:
      a[0] = p;
      a[1] = 0.5 * p * p;
      break;
    case 2:
      a[0] = p;
      a[1] = q;
      a[2] = 0.5 * p * p;
      a[3] = 0.5 * q * q;
      a[4] = p * q;
      break;
    case 3:
      a[0] = p;
      a[1] = q;
      a[2] = r;
      a[3] = 0.5 * p * p;
      a[4] = 0.5 * q * q;
      a[5] = 0.5 * r * r;
      a[6] = p * q;
      a[7] = p * r;
      a[8] = q * r;
      break;
    default:
      throw UnsupportedDimension("basis defined for dimensions 1-3");
  }
  return a;
}

// Weighted least-squares normal equations of one star:
//   H = sum_i w_i^2 a_i a_i^T
// together with the ingredients downstream recovery needs.
struct MomentSystem {
  int center = -1;  // node id, for diagnostics
  int dim = 0;
  int size = 0;  // C
  SmallMatrix H;
  std::vector<std::array<double, kMaxMomentSize>> basis;  // a_i per neighbor
  std::vector<double> weights;                            // w_i per neighbor
};

inline MomentSystem assemble_moment_system(const Star& star,
                                           std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != star.size())
    throw InvalidArgument("weight count " + std::to_string(weights.size()) +
                          " does not match star size " +
                          std::to_string(star.size()));
  int positive = 0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidArgument("weights must be nonnegative");
    if (w > 0.0) ++positive;
  }
  if (positive < moment_size(star.dim))
    throw RankDeficiencyError(
        "star at node " + std::to_string(star.center) + " has only " +
        std::to_string(positive) + " positive weights but needs " +
        std::to_string(moment_size(star.dim)) +
        " to determine all Taylor coefficients");
  MomentSystem sys;
  sys.center = star.center;
  sys.dim = star.dim;
  sys.size = moment_size(star.dim);
  sys.H = SmallMatrix(sys.size);
  sys.basis.reserve(static_cast<size_t>(star.size()));
  sys.weights.assign(weights.begin(), weights.end());

  for (int i = 0; i < star.size(); ++i) {
    const auto a = basis_row(star.dim, star.offsets[static_cast<size_t>(i)]);
    sys.basis.push_back(a);
    const double w2 = weights[static_cast<size_t>(i)] * weights[static_cast<size_t>(i)];
    for (int l = 0; l < sys.size; ++l)
      for (int j = 0; j <= l; ++j) sys.H(l, j) += w2 * a[static_cast<size_t>(l)] * a[static_cast<size_t>(j)];
  }
  // H is symmetric; mirror the strictly lower part computed above.
  for (int l = 0; l < sys.size; ++l)
    for (int j = l + 1; j < sys.size; ++j) sys.H(l, j) = sys.H(j, l);
  return sys;
}

// Lower-triangular Cholesky factor S with H = S S^T. A pivot at or below
// eps_pd = 1e-13 * trace(H) / C means the star geometry does not determine
// all C Taylor coefficients.
inline SmallMatrix cholesky_factor(const MomentSystem& sys) {
  const int n = sys.size;
  const double eps_pd = 1e-13 * trace(sys.H) / n;
  SmallMatrix s(n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j <= l; ++j) {
      double acc = sys.H(l, j);
      for (int k = 0; k < j; ++k) acc -= s(l, k) * s(j, k);
      if (j == l) {
        if (!(acc > eps_pd))
          throw SingularStarError(sys.center,
                                  "moment matrix is not positive definite, "
                                  "pivot " + std::to_string(l) + " is " +
                                  std::to_string(acc));
        s(l, l) = std::sqrt(acc);
      } else {
        s(l, j) = acc / s(j, j);
      }
    }
  }
  return s;
}

// Inverse of a lower-triangular matrix by the diagonal/column recursion
//   R(l,l) = 1 / S(l,l)
//   R(l,j) = -(1/S(l,l)) * sum_{k=j}^{l-1} S(l,k) R(k,j)   for l > j.
inline SmallMatrix invert_lower_triangular(const SmallMatrix& s) {
  const int n = s.size();
  SmallMatrix r(n);
  for (int l = 0; l < n; ++l) {
    if (s(l, l) == 0.0)
      throw InvalidArgument("triangular matrix has a zero diagonal entry");
    r(l, l) = 1.0 / s(l, l);
    for (int j = 0; j < l; ++j) {
      double acc = 0.0;
      for (int k = j; k < l; ++k) acc += s(l, k) * r(k, j);
      r(l, j) = -acc / s(l, l);
    }
  }
  return r;
}

// Same inverse, column by column through forward substitution of S x = e_j.
// Kept as an independent route; the two must agree to roundoff.
inline SmallMatrix invert_lower_triangular_by_substitution(const SmallMatrix& s) {
  const int n = s.size();
  SmallMatrix r(n);
  for (int j = 0; j < n; ++j) {
    for (int l = j; l < n; ++l) {
      if (s(l, l) == 0.0)
        throw InvalidArgument("triangular matrix has a zero diagonal entry");
      double acc = l == j ? 1.0 : 0.0;
      for (int k = j; k < l; ++k) acc -= s(l, k) * r(k, j);
      r(l, j) = acc / s(l, l);
    }
  }
  return r;
}

struct CholeskyPair {
  SmallMatrix S;
  SmallMatrix R;  // S^-1
};

inline CholeskyPair cholesky(const MomentSystem& sys) {
  CholeskyPair pair;
  pair.S = cholesky_factor(sys);
  pair.R = invert_lower_triangular(pair.S);
  return pair;
}

// Linear forms turning star values into derivative estimates: for
// derivative row l,
//   d_l = center_coeff(l) * u_center + sum_i coeff(l, i) * u_i
// with coeff(l,i) = w_i^2 (H^-1 a_i)_l and center_coeff(l) = -sum_i coeff(l,i),
// the latter an identity from the constant field being annihilated.
struct DerivativeStencils {
  int center = -1;
  int dim = 0;
  int size = 0;            // C
  std::vector<int> neighbors;
  std::vector<double> coeffs;        // [l * M + i]
  std::vector<double> center_coeffs;  // per derivative row

  double coeff(int l, int i) const {
    return coeffs[static_cast<size_t>(l) * neighbors.size() + static_cast<size_t>(i)];
  }
  double center_coeff(int l) const { return center_coeffs[static_cast<size_t>(l)]; }
};

inline DerivativeStencils derivative_coefficients(const Star& star,
                                                  const MomentSystem& sys,
                                                  const CholeskyPair& pair) {
  if (star.center != sys.center || star.size() != static_cast<int>(sys.basis.size()))
    throw InvalidArgument("star and moment system do not belong together");
  const int n = sys.size;
  const int m = star.size();

  DerivativeStencils out;
  out.center = sys.center;
  out.dim = sys.dim;
  out.size = n;
  out.neighbors = star.neighbors;
  out.coeffs.assign(static_cast<size_t>(n) * m, 0.0);
  out.center_coeffs.assign(static_cast<size_t>(n), 0.0);

  for (int i = 0; i < m; ++i) {
    SmallVector a(n);
    for (int l = 0; l < n; ++l) a[l] = sys.basis[static_cast<size_t>(i)][static_cast<size_t>(l)];
    // H^-1 a = R^T (R a), using only triangular products.
    const SmallVector t = multiply(pair.R, a);
    const SmallVector h = multiply_transpose(pair.R, t);
    const double w2 = sys.weights[static_cast<size_t>(i)] * sys.weights[static_cast<size_t>(i)];
    for (int l = 0; l < n; ++l) {
      const double c = w2 * h[l];
      out.coeffs[static_cast<size_t>(l) * m + static_cast<size_t>(i)] = c;
      out.center_coeffs[static_cast<size_t>(l)] -= c;
    }
  }
  return out;
}

// Derivative recovery straight from field values by explicit forward and
// backward substitution through the factorization, using the alpha/beta
// aggregates
//   alpha(i,j) = w_i^2 (a_i)_j,   beta(j) = sum_i alpha(i,j).
// Row l (from the last upward):
//   d_l = ( -u_c sum_j beta(j) R(l,j)
//           + sum_i u_i sum_j alpha(i,j) R(l,j)
//           - sum_{m>l} S(m,l) d_m ) / S(l,l).
// Independent of derivative_coefficients; the two must agree closely.
inline SmallVector derivatives_by_back_substitution(const MomentSystem& sys,
                                                    const CholeskyPair& pair,
                                                    double center_value,
                                                    std::span<const double> values) {
  const int n = sys.size;
  const int m = static_cast<int>(sys.basis.size());
  if (static_cast<int>(values.size()) != m)
    throw InvalidArgument("value count does not match star size");

  std::vector<double> beta(static_cast<size_t>(n), 0.0);
  std::vector<double> alpha(static_cast<size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    const double w2 = sys.weights[static_cast<size_t>(i)] * sys.weights[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double v = w2 * sys.basis[static_cast<size_t>(i)][static_cast<size_t>(j)];
      alpha[static_cast<size_t>(i) * n + static_cast<size_t>(j)] = v;
      beta[static_cast<size_t>(j)] += v;
    }
  }

  SmallVector d(n);
  for (int l = n - 1; l >= 0; --l) {
    double acc = 0.0;
    for (int j = 0; j <= l; ++j) acc -= center_value * beta[static_cast<size_t>(j)] * pair.R(l, j);
    for (int i = 0; i < m; ++i) {
      double inner = 0.0;
      for (int j = 0; j <= l; ++j)
        inner += alpha[static_cast<size_t>(i) * n + static_cast<size_t>(j)] * pair.R(l, j);
      acc += values[static_cast<size_t>(i)] * inner;
    }
    for (int mm = l + 1; mm < n; ++mm) acc -= pair.S(mm, l) * d[mm];
    d[l] = acc / pair.S(l, l);
  }
  return d;
}

// Laplacian stencil of one star: theta_i sums the pure-second-derivative
// rows of the neighbor coefficients, and the center coefficient is their
// total, applied with opposite sign:
//   lap u ~= -theta_c u_center + sum_i theta_i u_i,   theta_c = sum_i theta_i.
struct LaplacianStencil {
  int center = -1;
  std::vector<int> neighbors;
  std::vector<double> coeffs;  // theta_i
  double center_coeff = 0.0;   // theta_c
};

inline LaplacianStencil laplacian_stencil(const DerivativeStencils& stencils) {
  LaplacianStencil out;
  out.center = stencils.center;
  out.neighbors = stencils.neighbors;
  const int m = static_cast<int>(stencils.neighbors.size());
  out.coeffs.assign(static_cast<size_t>(m), 0.0);
  for (int row : laplacian_rows(stencils.dim))
    for (int i = 0; i < m; ++i) out.coeffs[static_cast<size_t>(i)] += stencils.coeff(row, i);
  for (double c : out.coeffs) out.center_coeff += c;
  return out;
}

inline double apply_stencil(const LaplacianStencil& stencil, double center_value,
                            std::span<const double> neighbor_values) {
  if (neighbor_values.size() != stencil.coeffs.size())
    throw InvalidArgument("value count does not match stencil size");
  double acc = -stencil.center_coeff * center_value;
  for (size_t i = 0; i < stencil.coeffs.size(); ++i)
    acc += stencil.coeffs[i] * neighbor_values[i];
  return acc;
}

// Laplacian stencils for every interior node, in star order. Parallel, and
// a pure function of its inputs regardless of worker count.
inline std::vector<LaplacianStencil> build_laplacian_stencils(
    const StarSet& stars, const WeightSpec& weight_spec, int workers = 0) {
  std::vector<LaplacianStencil> out(stars.stars.size());
  parallel_for(static_cast<int>(stars.stars.size()), workers, [&](int i) {
    const Star& star = stars.stars[static_cast<size_t>(i)];
    const auto w = star_weights(weight_spec, star);
    const MomentSystem sys = assemble_moment_system(star, w);
    const CholeskyPair pair = cholesky(sys);
    const DerivativeStencils ds = derivative_coefficients(star, sys, pair);
    out[static_cast<size_t>(i)] = laplacian_stencil(ds);
  });
  return out;
}

// Per-star dump of the moment matrix, its factor, and the Laplacian stencil,
// one CSV row per star. Column count depends on C and M, which are constant
// within one dump.
inline void write_stencil_dump(std::ostream& out, const StarSet& stars,
                               const WeightSpec& weight_spec) {
  if (stars.stars.empty()) return;
  const int c = moment_size(stars.stars.front().dim);
  const int m = stars.stars.front().size();

  out << "node";
  for (int l = 0; l < c; ++l)
    for (int j = 0; j < c; ++j) out << ",H" << l << j;
  for (int l = 0; l < c; ++l)
    for (int j = 0; j <= l; ++j) out << ",S" << l << j;
  out << ",theta_c";
  for (int i = 0; i < m; ++i) out << ",theta_" << i;
  out << '\n';

  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (const Star& star : stars.stars) {
    const auto w = star_weights(weight_spec, star);
    const MomentSystem sys = assemble_moment_system(star, w);
    const CholeskyPair pair = cholesky(sys);
    const DerivativeStencils ds = derivative_coefficients(star, sys, pair);
    const LaplacianStencil lap = laplacian_stencil(ds);
    out << star.center;
    for (int l = 0; l < c; ++l)
      for (int j = 0; j < c; ++j) put(sys.H(l, j));
    for (int l = 0; l < c; ++l)
      for (int j = 0; j <= l; ++j) put(pair.S(l, j));
    put(lap.center_coeff);
    for (int i = 0; i < m; ++i) put(lap.coeffs[static_cast<size_t>(i)]);
    out << '\n';
  }
}

}  // namespace gfdm
