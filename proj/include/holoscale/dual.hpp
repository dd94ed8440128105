// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace holoscale {

/// Forward-mode dual number over complex scalars with N independent
/// infinitesimal directions: x + sum_k d_k eps_k, eps_k eps_l = 0.
///
/// Only complex-differentiable operations are defined; for a holomorphic
/// expression evaluated with seeds eps_z, eps_w the infinitesimal parts are
/// exactly the complex partials d/dz and d/dw.
template <std::size_t N>
struct Dual {
  using Scalar = std::complex<double>;

  Scalar val{};
  std::array<Scalar, N> d{};

  constexpr Dual() = default;
  constexpr Dual(Scalar v) : val(v) {}  // NOLINT: implicit lift of constants
  constexpr Dual(double v) : val(v) {}  // NOLINT

  static Dual variable(Scalar v, std::size_t direction) {
    Dual x(v);
    x.d[direction] = 1.0;
    return x;
  }

  bool is_constant() const {
    for (const auto& e : d)
      if (e != Scalar{}) return false;
    return true;
  }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.val + b.val);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] + b.d[k];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.val - b.val);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] - b.d[k];
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r(-a.val);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = -a.d[k];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.val * b.val);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = a.d[k] * b.val + a.val * b.d[k];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const Scalar inv = 1.0 / b.val;
    Dual r(a.val * inv);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = (a.d[k] - r.val * b.d[k]) * inv;
    return r;
  }

  /// Chain rule for a scalar function with value fx and derivative dfx at val.
  Dual chain(Scalar fx, Scalar dfx) const {
    Dual r(fx);
    for (std::size_t k = 0; k < N; ++k) r.d[k] = dfx * d[k];
    return r;
  }
};

template <std::size_t N>
Dual<N> exp(const Dual<N>& x) {
  const auto e = std::exp(x.val);
  return x.chain(e, e);
}

template <std::size_t N>
Dual<N> log(const Dual<N>& x) {
  return x.chain(std::log(x.val), 1.0 / x.val);
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& x) {
  const auto s = std::sqrt(x.val);
  return x.chain(s, 0.5 / s);
}

/// Principal power x^p for a constant exponent.
template <std::size_t N>
Dual<N> pow(const Dual<N>& x, std::complex<double> p) {
  const auto v = std::pow(x.val, p);
  return x.chain(v, p * v / x.val);
}

}  // namespace holoscale
