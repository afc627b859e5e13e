#pragma once

#include <array>
#include <cmath>
#include <cstring>

#include "gfdm/errors.hpp"

namespace gfdm {

// Largest moment system: nine Taylor coefficients in 3D.
inline constexpr int kMaxMomentSize = 9;

// Dense square matrix with runtime size <= kMaxMomentSize, stack storage.
// Row-major. Sized for per-star moment systems; not a general-purpose type.
class SmallMatrix {
 public:
  SmallMatrix() : n_(0) { data_.fill(0.0); }

  explicit SmallMatrix(int n) : n_(n) {
    if (n < 1 || n > kMaxMomentSize)
      throw InvalidArgument("SmallMatrix size must be in [1, 9], got " +
                            std::to_string(n));
    data_.fill(0.0);
  }

  static SmallMatrix identity(int n) {
    SmallMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * kMaxMomentSize + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * kMaxMomentSize + c]; }

 private:
  int n_;
  std::array<double, kMaxMomentSize * kMaxMomentSize> data_;
};

// Vector companion to SmallMatrix.
class SmallVector {
 public:
  SmallVector() : n_(0) { data_.fill(0.0); }

  explicit SmallVector(int n) : n_(n) {
    if (n < 1 || n > kMaxMomentSize)
      throw InvalidArgument("SmallVector size must be in [1, 9], got " +
                            std::to_string(n));
    data_.fill(0.0);
  }

  int size() const { return n_; }

  double& operator[](int i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<size_t>(i)]; }

 private:
  int n_;
  std::array<double, kMaxMomentSize> data_;
};

inline SmallMatrix multiply(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.size() != b.size())
    throw InvalidArgument("matrix product needs equal sizes");
  const int n = a.size();
  SmallMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline SmallVector multiply(const SmallMatrix& a, const SmallVector& x) {
  if (a.size() != x.size())
    throw InvalidArgument("matrix-vector product needs equal sizes");
  const int n = a.size();
  SmallVector y(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// y = A^T x without forming the transpose.
inline SmallVector multiply_transpose(const SmallMatrix& a, const SmallVector& x) {
  if (a.size() != x.size())
    throw InvalidArgument("matrix-vector product needs equal sizes");
  const int n = a.size();
  SmallVector y(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a(i, j) * x[i];
    y[j] = s;
  }
  return y;
}

inline double frobenius_norm(const SmallMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double trace(const SmallMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a(i, i);
  return s;
}

}  // namespace gfdm
