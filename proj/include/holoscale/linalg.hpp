// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace holoscale {

using cd = std::complex<double>;

/// A point (z, w) of C^2.
struct Point {
  cd z{};
  cd w{};

  friend Point operator+(const Point& a, const Point& b) { return {a.z + b.z, a.w + b.w}; }
  friend Point operator-(const Point& a, const Point& b) { return {a.z - b.z, a.w - b.w}; }
  friend Point operator*(cd s, const Point& a) { return {s * a.z, s * a.w}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(const Point& p) { return std::sqrt(std::norm(p.z) + std::norm(p.w)); }

inline bool is_finite(cd x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }
inline bool is_finite(const Point& p) { return is_finite(p.z) && is_finite(p.w); }

/// Row-major 2x2 complex matrix.
struct Mat2 {
  cd a11{}, a12{}, a21{}, a22{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(cd d1, cd d2) { return {d1, 0.0, 0.0, d2}; }

  cd det() const { return a11 * a22 - a12 * a21; }
  cd trace() const { return a11 + a22; }

  Mat2 inverse() const {
    const cd d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  Mat2 adjoint() const { return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)}; }

  Point operator*(const Point& p) const { return {a11 * p.z + a12 * p.w, a21 * p.z + a22 * p.w}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
  }

  double max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest singular value, closed form for 2x2: the larger eigenvalue of
/// M^H M is (s + sqrt(s^2 - 4|det|^2)) / 2 with s the squared Frobenius norm.
inline double op_norm(const Mat2& m) {
  const double s = std::norm(m.a11) + std::norm(m.a12) + std::norm(m.a21) + std::norm(m.a22);
  const double d = std::abs(m.det());
  const double disc = std::max(0.0, (s - 2.0 * d) * (s + 2.0 * d));
  return std::sqrt((s + std::sqrt(disc)) / 2.0);
}

}  // namespace holoscale
