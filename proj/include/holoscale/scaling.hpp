// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "holoscale/holo_diff.hpp"

namespace holoscale {

enum class ScalingMode { Frankel, VarietyEigen };

constexpr std::string_view to_string(ScalingMode m) {
  return m == ScalingMode::Frankel ? "Frankel" : "VarietyEigen";
}

/// One term A_j of a scaled sequence: p -> normalizer * (phi_j(p) - anchor).
struct ScalingStep {
  int j = 0;
  ScalingMode mode = ScalingMode::Frankel;
  Mat2 normalizer = Mat2::identity();
  Point anchor{};
  MapFamily family;
  // Variety mode only.
  EigenPair eigen{};
  Mat2 eigenvectors = Mat2::identity();

  Point operator()(const Point& p) const { return normalizer * (family.apply(j, p) - anchor); }
  Mat2 jacobian(const Point& p) const { return normalizer * holoscale::jacobian(family, j, p).m; }
};

inline ScalingStep frankel_scale(const MapFamily& fam, const Point& q, int j, const Tolerances& tol = {}) {
  const auto jq = jacobian(fam, j, q);
  if (std::abs(jq.det()) < tol.det_degenerate)
    throw Error(ErrorKind::DegenerateJacobian, "frankel_scale", "at q, j=" + std::to_string(j));
  ScalingStep s;
  s.j = j;
  s.mode = ScalingMode::Frankel;
  s.normalizer = jq.m.inverse();
  s.anchor = fam.apply(j, q);
  s.family = fam;
  return s;
}

inline ScalingStep variety_scale(const MapFamily& fam, const Point& q, int j, const Tolerances& tol = {}) {
  const auto jq = jacobian(fam, j, q);
  const auto e = eigenpair(jq.m, tol.eig_degenerate);
  const Mat2 rows = eigenvector_rows(jq.m, e);
  const double d = std::abs(rows.det());
  if (e.degenerate || d < tol.eigvec_indep)
    throw Error(ErrorKind::DegenerateEigenvectors, "variety_scale",
                "|det| of the eigenvector matrix is " + dsl::detail::format_double(d) + " at j=" + std::to_string(j));
  if (e.lambda2 == cd{})
    throw Error(ErrorKind::DegenerateJacobian, "variety_scale", "lambda2 vanishes at j=" + std::to_string(j));
  ScalingStep s;
  s.j = j;
  s.mode = ScalingMode::VarietyEigen;
  s.normalizer = Mat2::diag(1.0, 1.0 / e.lambda2) * rows;
  s.anchor = Point{};
  s.family = fam;
  s.eigen = e;
  s.eigenvectors = rows;
  return s;
}

/// M_j: sup over the sample set of ||(J phi_j(q))^-1 J phi_j(p)||_op.
inline double norm_sup(const MapFamily& fam, const Point& q, int j, std::span<const Point> grid,
                       const Tolerances& tol = {}) {
  const auto jq = jacobian(fam, j, q);
  if (std::abs(jq.det()) < tol.det_degenerate)
    throw Error(ErrorKind::DegenerateJacobian, "norm_sup", "at q, j=" + std::to_string(j));
  const Mat2 inv = jq.m.inverse();
  double sup = 0.0;
  for (const auto& p : grid) sup = std::max(sup, op_norm(inv * jacobian(fam, j, p).m));
  return sup;
}

enum class Normality { Bounded, Unbounded, Inconclusive };

constexpr std::string_view to_string(Normality n) {
  switch (n) {
    case Normality::Bounded: return "Bounded";
    case Normality::Unbounded: return "Unbounded";
    case Normality::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Bounded when the last half of the sequence stays within a relative band
/// of its median; Unbounded when log M grows affinely faster than the
/// growth threshold.
inline Normality normality_diagnostic(std::span<const double> m, const Tolerances& tol = {}) {
  if (m.size() < 6) return Normality::Inconclusive;
  for (double x : m)
    if (!(x > 0.0) || !std::isfinite(x)) return Normality::Inconclusive;
  const std::size_t half = m.size() / 2;
  const std::vector<double> tail(m.end() - static_cast<std::ptrdiff_t>(half), m.end());
  const double med = median(tail);
  const bool flat = std::all_of(tail.begin(), tail.end(),
                                [&](double x) { return std::abs(x - med) <= tol.norm_flat * med; });
  if (flat) return Normality::Bounded;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < m.size(); ++k) {
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(m[k]));
  }
  const auto fit = fit_line(xs, ys);
  if (fit.slope > tol.norm_growth && fit.r2 > 0.9) return Normality::Unbounded;
  return Normality::Inconclusive;
}

// ---------------------------------------------------------------------------
// Model domains D x_theta H+

/// {(z, w) : z in base, w in e^{i theta(z)} H+}; the base defaults to the
/// unit disc.
struct RtimesDomain {
  dsl::Expr theta;
  std::function<bool(cd)> base;

  double angle(cd z) const { return theta(dsl::Bindings{}.set(dsl::Var::Z, z)).real(); }

  bool contains(const Point& p) const {
    const bool in_base = base ? base(p.z) : std::abs(p.z) < 1.0;
    if (!in_base) return false;
    return (std::exp(cd(0.0, -angle(p.z))) * p.w).imag() > 0.0;
  }
};

inline bool rtimes_membership(const RtimesDomain& d, const Point& p) { return d.contains(p); }

enum class ModelAction { Ln, TranslateT, DilateT };

/// L_n: (z, w/n); translation (z, w + t); dilation (z, w e^{-t}).
inline Point model_action(ModelAction kind, double param, const Point& p) {
  switch (kind) {
    case ModelAction::Ln: return {p.z, p.w / param};
    case ModelAction::TranslateT: return {p.z, p.w + param};
    case ModelAction::DilateT: return {p.z, p.w * std::exp(-param)};
  }
  return p;
}

}  // namespace holoscale
