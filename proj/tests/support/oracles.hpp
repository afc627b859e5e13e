#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the slow, obvious way.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <gfdm/linalg.hpp>
#include <gfdm/stars.hpp>

namespace oracle {

// Dense solve of A x = b by Gaussian elimination with partial pivoting.
// Operates on copies; no factorization is shared with the library path.
inline gfdm::SmallVector solve_dense(gfdm::SmallMatrix a, gfdm::SmallVector b) {
  const int n = a.size();
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0)
      throw std::runtime_error("singular matrix in reference solver");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  gfdm::SmallVector x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return x;
}

// 2D moment matrix written out entry by entry as explicit polynomial sums
// over the star offsets, one literal formula per entry of the upper triangle.
inline gfdm::SmallMatrix moment_matrix_2d_longhand(
    const gfdm::Star& star, std::span<const double> weights) {
  gfdm::SmallMatrix h(5);
  for (int i = 0; i < star.size(); ++i) {
    const double p = star.offsets[static_cast<size_t>(i)][0];
    const double q = star.offsets[static_cast<size_t>(i)][1];
    const double w2 = weights[static_cast<size_t>(i)] * weights[static_cast<size_t>(i)];
    h(0, 0) += p * p * w2;
    h(0, 1) += p * q * w2;
    h(0, 2) += p * p * p / 2.0 * w2;
    h(0, 3) += p * q * q / 2.0 * w2;
    h(0, 4) += p * p * q * w2;
    h(1, 1) += q * q * w2;
    h(1, 2) += p * p * q / 2.0 * w2;
    h(1, 3) += q * q * q / 2.0 * w2;
    h(1, 4) += p * q * q * w2;
    h(2, 2) += p * p * p * p / 4.0 * w2;
    h(2, 3) += p * p * q * q / 4.0 * w2;
    h(2, 4) += p * p * p * q / 2.0 * w2;
    h(3, 3) += q * q * q * q / 4.0 * w2;
    h(3, 4) += p * q * q * q / 2.0 * w2;
    h(4, 4) += p * p * q * q * w2;
  }
  for (int l = 0; l < 5; ++l)
    for (int j = 0; j < l; ++j) h(l, j) = h(j, l);
  return h;
}

// Classical explicit central-difference solution of v_t = rho * v_xx on
// [0, 1] with v(0) = v(1) = 0 and v(x, 0) = sin(pi x), evaluated at T on a
// uniform grid of n nodes. The time step is chosen well inside the classical
// stability limit and rounded to divide T exactly.
struct Heat1dReference {
  std::vector<double> x;
  std::vector<double> v;
};

inline Heat1dReference heat1d_reference(double rho, double final_time, int n) {
  if (n < 3) throw std::runtime_error("reference grid needs at least 3 nodes");
  const double h = 1.0 / (n - 1);
  const double dt_raw = 0.45 * h * h / rho;
  const long long nt = static_cast<long long>(std::ceil(final_time / dt_raw));
  const double dt = final_time / static_cast<double>(nt);
  const double lam = rho * dt / (h * h);

  Heat1dReference ref;
  ref.x.resize(static_cast<size_t>(n));
  ref.v.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    ref.x[static_cast<size_t>(i)] = i * h;
    ref.v[static_cast<size_t>(i)] = std::sin(M_PI * i * h);
  }
  std::vector<double> next(ref.v);
  for (long long k = 0; k < nt; ++k) {
    for (int i = 1; i + 1 < n; ++i)
      next[static_cast<size_t>(i)] =
          ref.v[static_cast<size_t>(i)] +
          lam * (ref.v[static_cast<size_t>(i + 1)] - 2.0 * ref.v[static_cast<size_t>(i)] +
                 ref.v[static_cast<size_t>(i - 1)]);
    next.front() = 0.0;
    next.back() = 0.0;
    ref.v.swap(next);
  }
  return ref;
}

// Piecewise-linear interpolation on a sorted abscissa grid.
inline double interp_linear(std::span<const double> xs, std::span<const double> vals,
                            double x) {
  if (x <= xs.front()) return vals.front();
  if (x >= xs.back()) return vals.back();
  size_t hi = 1;
  while (xs[hi] < x) ++hi;
  const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return (1.0 - t) * vals[hi - 1] + t * vals[hi];
}

}  // namespace oracle
