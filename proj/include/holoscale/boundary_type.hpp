// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "holoscale/holo_diff.hpp"

namespace holoscale {

// ---------------------------------------------------------------------------
// Normal form

/// Local presentation Im w' > rho(z', Re w') of a domain around a boundary
/// point p, in coordinates x' = frame * (x - translation).
struct NormalForm {
  std::function<double(cd, double)> rho;      // rho(z', u)
  std::function<double(cd, double)> log_rho;  // log rho, may use log-space evaluation
  Point translation{};
  Mat2 frame = Mat2::identity();
  double trust_radius = 1.0;

  double rho0(cd z) const { return rho(z, 0.0); }
  double log_rho0(cd z) const { return log_rho(z, 0.0); }

  Point to_normal(const Point& x) const { return frame * (x - translation); }
  Point from_normal(const Point& xn) const { return frame.adjoint() * xn + translation; }

  /// A domain that is already written as Im w > rho near the origin.
  static NormalForm from_defining(const dsl::DefiningFunction& df) {
    NormalForm nf;
    nf.rho = [df](cd z, double u) { return df(z, u); };
    nf.log_rho = [df](cd z, double u) { return df.log_value(z, u); };
    nf.trust_radius = df.validity_radius;
    return nf;
  }
};

namespace detail {

/// Evaluates a real defining function, reading removable singularities at
/// the evaluation point as the average over a small symmetric ring.
inline double eval_removable(const std::function<double(const Point&)>& r, const Point& x) {
  try {
    return r(x);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DivisionByZero && e.kind() != ErrorKind::BranchCutViolation) throw;
  }
  constexpr double d = 1e-7;
  const std::array<cd, 4> ring = {cd(d, 0), cd(0, d), cd(-d, 0), cd(0, -d)};
  for (int coord = 0; coord < 2; ++coord) {
    try {
      double acc = 0.0;
      for (const cd& o : ring) acc += r(coord == 0 ? Point{x.z + o, x.w} : Point{x.z, x.w + o});
      return acc / 4.0;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::EvaluationError, "normal_form", "defining function cannot be evaluated near the point");
}

inline std::function<double(const Point&)> real_part_of(const dsl::Expr& r) {
  return [r](const Point& x) { return r(dsl::Bindings{}.set(dsl::Var::Z, x.z).set(dsl::Var::W, x.w)).real(); };
}

}  // namespace detail

/// Translation, unitary frame and implicit solve bringing {r < 0} into the
/// form Im w' > rho(z', Re w') at p.
inline NormalForm normal_form(std::function<double(const Point&)> r, const Point& p, double trust_radius = 1.0) {
  const double rp = detail::eval_removable(r, p);
  if (!(std::abs(rp) < 1e-10))
    throw Error(ErrorKind::PreconditionFailed, "normal_form",
                "point is not on the boundary, r(p) = " + dsl::detail::format_double(rp));
  // Complex gradient (r_x + i r_y, r_s + i r_t) by central differences.
  constexpr double h = 1e-6;
  auto partial = [&](const Point& dir) {
    return (detail::eval_removable(r, p + h * dir) - detail::eval_removable(r, p - h * dir)) / (2.0 * h);
  };
  const cd nz(partial({1.0, 0.0}), partial({cd(0, 1), 0.0}));
  const cd nw(partial({0.0, 1.0}), partial({0.0, cd(0, 1)}));
  const double len = std::hypot(std::abs(nz), std::abs(nw));
  // A critical point still shows an O(h^2) difference quotient.
  if (!(len > 1e-8)) throw Error(ErrorKind::DegenerateGradient, "normal_form", "gradient vanishes at p");
  // Inward unit normal goes to +i along the w'-axis.
  const cd in_z = -nz / len, in_w = -nw / len;
  const cd s1 = cd(0, 1) * std::conj(in_z), s2 = cd(0, 1) * std::conj(in_w);
  cd t1 = std::conj(s2), t2 = -std::conj(s1);
  const cd big = std::abs(t1) >= std::abs(t2) ? t1 : t2;
  const cd phase = std::conj(big) / std::abs(big);
  t1 *= phase;
  t2 *= phase;

  NormalForm nf;
  nf.translation = p;
  nf.frame = {t1, t2, s1, s2};
  nf.trust_radius = trust_radius;
  const Mat2 back = nf.frame.adjoint();
  auto solve = [r, p, back, trust_radius](cd z, double u) -> double {
    auto f = [&](double v) { return detail::eval_removable(r, back * Point{z, cd(u, v)} + p); };
    const double f0 = f(0.0);
    if (f0 == 0.0) return 0.0;
    // Outside (f > 0) means the boundary lies above; march in that direction.
    const double dir = f0 > 0.0 ? 1.0 : -1.0;
    double lo = 0.0, flo = f0, step = 1e-3;
    double hi = 0.0, fhi = f0;
    while (true) {
      hi = lo + dir * step;
      if (std::abs(lo) >= trust_radius)
        throw Error(ErrorKind::SolveFailure, "normal_form", "no sign change of r within the trust region");
      hi = std::clamp(hi, -trust_radius, trust_radius);
      fhi = f(hi);
      if ((fhi > 0.0) != (f0 > 0.0) || fhi == 0.0) break;
      lo = hi;
      flo = fhi;
      step *= 2.0;
    }
    if (fhi == 0.0) return hi;
    double a = lo, b = hi, fa = flo, fb = fhi;
    if (a > b) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                          boost::math::tools::eps_tolerance<double>(52), iters);
    const double v = 0.5 * (bracket.first + bracket.second);
    const double res = f(v);
    if (!(std::abs(res) < 1e-10))
      throw Error(ErrorKind::SolveFailure, "normal_form", "residual " + dsl::detail::format_double(res));
    return v;
  };
  nf.rho = solve;
  nf.log_rho = [solve](cd z, double u) { return std::log(std::abs(solve(z, u))); };
  return nf;
}

inline NormalForm normal_form(const dsl::Expr& r, const Point& p, double trust_radius = 1.0) {
  return normal_form(detail::real_part_of(r), p, trust_radius);
}

// ---------------------------------------------------------------------------
// Order of vanishing

struct VanishingOrder {
  int order = 0;
  bool infinite = false;  // order >= max_order
  double last_slope = 0.0;
};

/// Order of vanishing at 0 of a function sampled along a geometric ladder
/// eps_k = eps0 * 2^-k, from the local slopes of log|f| against log eps.
/// `log_abs_f` returns log|f(eps)|.
inline VanishingOrder vanishing_order_log(const std::function<double(double)>& log_abs_f, int max_order = 16,
                                          double eps0 = 0.5, int max_steps = 48) {
  constexpr double kFit = 0.1;
  const double step = std::log(0.5);
  std::vector<double> slopes;
  double prev = log_abs_f(eps0);
  if (!std::isfinite(prev)) throw Error(ErrorKind::NoiseFloor, "vanishing_order", "no usable value at the first rung");
  VanishingOrder out;
  for (int k = 1; k <= max_steps; ++k) {
    const double cur = log_abs_f(eps0 * std::ldexp(1.0, -k));
    if (!std::isfinite(cur)) {
      if (!slopes.empty() && slopes.back() > max_order - 0.5) {
        out.infinite = true;
        out.order = max_order;
        return out;
      }
      throw Error(ErrorKind::NoiseFloor, "vanishing_order",
                  "value underflows at eps = " + dsl::detail::format_double(eps0 * std::ldexp(1.0, -k)));
    }
    const double s = (cur - prev) / step;
    prev = cur;
    slopes.push_back(s);
    out.last_slope = s;
    if (s > max_order + 0.5) {
      out.infinite = true;
      out.order = max_order;
      return out;
    }
    const std::size_t n = slopes.size();
    if (n >= 3) {
      const double r = std::round(s);
      const bool stable = std::abs(slopes[n - 1] - slopes[n - 2]) < kFit && std::abs(slopes[n - 1] - slopes[n - 3]) < kFit;
      if (stable && std::abs(s - r) < kFit) {
        out.order = static_cast<int>(r);
        if (out.order >= max_order) out.infinite = true;
        return out;
      }
    }
  }
  const std::size_t n = slopes.size();
  if (n >= 2 && slopes[n - 1] > slopes[n - 2] + kFit) {
    out.infinite = true;
    out.order = max_order;
  } else {
    out.order = static_cast<int>(std::round(out.last_slope));
  }
  return out;
}

/// Same on a plain-valued function; values below 1e-300 count as underflow.
inline VanishingOrder vanishing_order(const std::function<double(double)>& f, int max_order = 16, double eps0 = 0.5) {
  return vanishing_order_log(
      [&f](double e) {
        const double v = std::abs(f(e));
        return v < 1e-300 ? -std::numeric_limits<double>::infinity() : std::log(v);
      },
      max_order, eps0);
}

// ---------------------------------------------------------------------------
// D'Angelo type

enum class TypeKind { Finite, InfiniteTypeI, InfiniteTypeII_suspect, Inconclusive };

constexpr std::string_view to_string(TypeKind k) {
  switch (k) {
    case TypeKind::Finite: return "Finite";
    case TypeKind::InfiniteTypeI: return "InfiniteTypeI";
    case TypeKind::InfiniteTypeII_suspect: return "InfiniteTypeII_suspect";
    case TypeKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Analytic disc xi -> (sum a_k xi^k, sum b_k xi^k), k >= 1.
struct Disc {
  std::vector<cd> a;
  std::vector<cd> b;

  static cd poly(const std::vector<cd>& c, cd xi) {
    cd acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = (acc + c[k]) * xi;
    return acc;
  }
  Point operator()(cd xi) const { return {poly(a, xi), poly(b, xi)}; }

  int order() const {
    auto first = [](const std::vector<cd>& c) {
      for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != cd{}) return static_cast<int>(k) + 1;
      return std::numeric_limits<int>::max();
    };
    return std::min(first(a), first(b));
  }
  bool second_is_zero() const {
    return std::all_of(b.begin(), b.end(), [](cd c) { return c == cd{}; });
  }
};

struct DiscSearch {
  int degree = 3;          // highest power in the lattice discs
  double step = 0.25;      // lattice spacing of the complex coefficients
  double modulus = 2.0;    // coefficient modulus bound
  int max_monomial = 6;    // m range of the monomial discs
  int max_order = 16;
};

struct TypeReport {
  TypeKind kind = TypeKind::Inconclusive;
  double t_estimate = 0.0;  // +infinity is the sentinel for "no finite order found"
  std::vector<std::pair<double, double>> m_z_samples;
  Disc witness;
  bool exhausted = false;
  std::size_t discs_tested = 0;
};

namespace detail {

inline constexpr std::array<double, 5> kGenericPhases = {0.3, 1.5, 2.6, 3.9, 5.2};

/// Order of vanishing of rho o psi, the minimum over generic ray directions.
/// Directions along which the pullback vanishes identically are skipped.
inline VanishingOrder disc_order(const NormalForm& nf, const Disc& psi, int max_order, double eps0 = 0.5) {
  VanishingOrder best;
  best.order = max_order;
  best.infinite = true;
  const bool flat = psi.second_is_zero();
  for (double phi : kGenericPhases) {
    const cd dir = std::polar(1.0, phi);
    std::function<double(double)> lf;
    if (flat) {
      lf = [&](double e) { return nf.log_rho0(Disc::poly(psi.a, e * dir)); };
    } else {
      lf = [&](double e) {
        const Point x = psi(e * dir);
        const double v = std::abs(nf.rho(x.z, x.w.real()) - x.w.imag());
        return v < 1e-300 ? -std::numeric_limits<double>::infinity() : std::log(v);
      };
    }
    VanishingOrder o;
    bool usable = false;
    // Rungs outside the trust region of the normal form are retried closer in.
    for (double start = eps0; !usable; start *= 0.25) {
      try {
        o = vanishing_order_log(lf, max_order, start);
        usable = true;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoiseFloor) break;
        if (e.kind() != ErrorKind::SolveFailure || start < eps0 / 60.0) throw;
      }
    }
    if (!usable) continue;
    if (!o.infinite && (best.infinite || o.order < best.order)) best = o;
  }
  return best;
}

inline std::vector<cd> lattice(double step, double modulus) {
  std::vector<cd> out;
  const int n = static_cast<int>(std::floor(modulus / step + 1e-9));
  for (int x = -n; x <= n; ++x)
    for (int y = -n; y <= n; ++y) {
      const cd c(x * step, y * step);
      if (std::abs(c) <= modulus + 1e-12) out.push_back(c);
    }
  return out;
}

}  // namespace detail

/// Lower-bound estimate of the D'Angelo type at the origin of a normal form
/// by brute force over monomial and lattice discs.
inline TypeReport dangelo_type(const NormalForm& nf, const DiscSearch& search = {}) {
  TypeReport rep;
  double best = -1.0;
  auto consider = [&](Disc psi) {
    ++rep.discs_tested;
    const auto o = detail::disc_order(nf, psi, search.max_order);
    const double ratio =
        o.infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(o.order) / psi.order();
    if (ratio > best) {
      best = ratio;
      rep.witness = std::move(psi);
    }
  };
  consider({{1.0}, {}});
  if (std::isinf(best)) {
    rep.kind = TypeKind::Inconclusive;
    rep.t_estimate = best;
    rep.exhausted = false;
    return rep;
  }
  const std::array<cd, 4> units = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  for (int m = 1; m <= search.max_monomial; ++m)
    for (const cd& c : units) {
      std::vector<cd> mono(static_cast<std::size_t>(m), 0.0);
      mono.back() = c;
      consider({{1.0}, mono});
      consider({mono, {1.0}});
    }
  if (search.degree >= 2) {
    const auto coeffs = detail::lattice(search.step, search.modulus);
    // Second component b2 xi^2 + ... + b_d xi^d, first component xi.
    std::vector<std::size_t> idx(static_cast<std::size_t>(search.degree - 1), 0);
    while (true) {
      std::vector<cd> b(static_cast<std::size_t>(search.degree), 0.0);
      for (std::size_t k = 0; k < idx.size(); ++k) b[k + 1] = coeffs[idx[k]];
      consider({{1.0}, b});
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == coeffs.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  rep.exhausted = true;
  rep.t_estimate = best;
  if (std::isinf(best)) {
    rep.kind = TypeKind::Inconclusive;
    return rep;
  }
  // Cross-check on a shifted ladder.
  const auto check = detail::disc_order(nf, rep.witness, search.max_order, 0.35);
  const double recheck =
      check.infinite ? std::numeric_limits<double>::infinity() : static_cast<double>(check.order) / rep.witness.order();
  rep.kind = recheck == best ? TypeKind::Finite : TypeKind::Inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------
// Infinite type I

/// m_z = log(rho(a z) / rho(z)) / log|a|, evaluated in log space.
inline double mz_estimate(const std::function<double(cd)>& log_rho0, cd z, cd a) {
  const double lz = log_rho0(z);
  const double laz = log_rho0(a * z);
  if (!std::isfinite(lz) || !std::isfinite(laz))
    throw Error(ErrorKind::NoiseFloor, "type_I_classifier", "log rho is not finite");
  return (laz - lz) / std::log(std::abs(a));
}

struct TypeIParams {
  std::vector<double> a_moduli = {0.9, 0.7, 0.5};
  int a_phases = 5;
  std::vector<double> z_ladder = {0.2, 0.1, 0.05, 0.025};
  int z_phases = 4;
  int max_order = 16;
};

struct TypeIResult {
  TypeKind kind = TypeKind::InfiniteTypeII_suspect;
  std::vector<std::pair<double, double>> m_z_samples;  // (|z|, min over a of m_z)
};

inline TypeIResult type_I_classifier(const std::function<double(cd)>& log_rho0, const TypeIParams& prm = {},
                                     const Tolerances& tol = {}) {
  const auto along_axis = vanishing_order_log([&](double e) { return log_rho0(cd(e, 0.0)); }, prm.max_order);
  if (!along_axis.infinite)
    throw Error(ErrorKind::PreconditionFailed, "type_I_classifier",
                "finite order of vanishing " + std::to_string(along_axis.order) + " along (xi, 0)");
  TypeIResult out;
  for (double r : prm.z_ladder) {
    double worst = std::numeric_limits<double>::infinity();
    for (int iz = 0; iz < prm.z_phases; ++iz) {
      const cd z = std::polar(r, 0.4 + 6.283185307179586 * iz / prm.z_phases);
      for (double am : prm.a_moduli)
        for (int ia = 0; ia < prm.a_phases; ++ia) {
          const cd a = std::polar(am, 6.283185307179586 * ia / prm.a_phases);
          worst = std::min(worst, mz_estimate(log_rho0, z, a));
        }
    }
    out.m_z_samples.emplace_back(r, worst);
  }
  bool doubling = out.m_z_samples.size() >= 2;
  for (std::size_t k = 1; k < out.m_z_samples.size(); ++k) {
    const double prev = out.m_z_samples[k - 1].second, cur = out.m_z_samples[k].second;
    const double scale = out.m_z_samples[k - 1].first / out.m_z_samples[k].first;
    if (!(prev > 0.0) || !(cur >= scale * (1.0 - tol.mz) * prev)) doubling = false;
  }
  out.kind = doubling ? TypeKind::InfiniteTypeI : TypeKind::InfiniteTypeII_suspect;
  return out;
}

/// Type search followed by the type I/II split when no finite order shows up.
inline TypeReport classify_type(const NormalForm& nf, const DiscSearch& search = {}, const TypeIParams& prm = {},
                                const Tolerances& tol = {}) {
  auto rep = dangelo_type(nf, search);
  if (rep.kind == TypeKind::Inconclusive && std::isinf(rep.t_estimate)) {
    auto t1 = type_I_classifier([&nf](cd z) { return nf.log_rho0(z); }, prm, tol);
    rep.kind = t1.kind;
    rep.m_z_samples = std::move(t1.m_z_samples);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling collapse

struct CollapseResult {
  std::vector<int> js;
  std::vector<double> log_sup;  // natural log of the sup at each j
  double sup_at_jmax = 0.0;
};

/// sup over the grid of |rho(b11 z + b12 w) / b22| per j.
inline CollapseResult collapse_check(const std::function<double(cd)>& log_rho0, std::span<const double> b11,
                                     std::span<const double> b12, std::span<const double> b22,
                                     std::span<const Point> grid, int jmin = 1) {
  if (b11.size() != b12.size() || b11.size() != b22.size())
    throw Error(ErrorKind::PreconditionFailed, "collapse_check", "b-sequences differ in length");
  CollapseResult out;
  for (std::size_t k = 0; k < b11.size(); ++k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : grid) {
      const cd x = b11[k] * p.z + b12[k] * p.w;
      if (x == cd{}) continue;  // rho(0) = 0
      const double l = log_rho0(x);
      if (std::isnan(l)) throw Error(ErrorKind::NoiseFloor, "collapse_check", "log rho is NaN");
      worst = std::max(worst, l);
    }
    out.js.push_back(jmin + static_cast<int>(k));
    out.log_sup.push_back(worst - std::log(std::abs(b22[k])));
  }
  out.sup_at_jmax = out.log_sup.empty() ? 0.0 : std::exp(out.log_sup.back());
  return out;
}

// ---------------------------------------------------------------------------
// Limit boundary

struct LimitFit {
  int k = 0;
  cd h{}, c{}, d{};
  double offset = 0.0;  // Im of the translated base point over |b22|
  double beta = 0.0;    // limit of arg b22
  bool swapped = false; // scaled coordinates were exchanged so |b22| >= |b21|
  double residual = 0.0;
};

namespace detail {

/// Richardson step for x_j = x + C delta_j with known delta_j.
inline cd extrapolate(cd x_prev, cd x_cur, double d_prev, double d_cur) {
  if (!(d_prev > d_cur)) return x_cur;
  return x_cur + (x_cur - x_prev) * d_cur / (d_prev - d_cur);
}

}  // namespace detail

inline LimitFit limit_boundary_fit(const MapFamily& fam, const Point& q, const NormalForm& nf, int k, int jmin, int jmax,
                                   const Tolerances& tol = {}) {
  if (k < 1) throw Error(ErrorKind::PreconditionFailed, "limit_boundary_fit", "type must be a positive integer");
  if (jmax - jmin < 3) throw Error(ErrorKind::PreconditionFailed, "limit_boundary_fit", "need at least 4 indices");
  LimitFit fit;
  fit.k = k;
  auto b_at = [&](int j) { return nf.frame * jacobian(fam, j, q).m; };
  {
    const Mat2 b = b_at(jmax);
    fit.swapped = std::abs(b.a21) > std::abs(b.a22);
  }
  struct Sample {
    Mat2 b;
    Point t;
  };
  auto sample = [&](int j) {
    Mat2 b = b_at(j);
    if (fit.swapped) b = {b.a12, b.a11, b.a22, b.a21};
    return Sample{b, nf.to_normal(fam.apply(j, q))};
  };

  std::vector<double> b22mod, delta;
  std::vector<std::array<cd, 5>> ratios;  // h, c, d, offset, unit phase
  for (int j = jmin; j <= jmax; ++j) {
    const auto s = sample(j);
    const double m22 = std::abs(s.b.a22);
    if (!(m22 > 0.0)) throw Error(ErrorKind::NonConvergentRatio, "limit_boundary_fit", "b22 vanishes");
    const double root = std::pow(m22, 1.0 / k);
    b22mod.push_back(m22);
    delta.push_back(std::abs(fam.alpha(j) - fam.param_limit));
    ratios.push_back({s.b.a21 / s.b.a22, s.b.a11 / root, s.b.a12 / root, cd(s.t.w.imag() / m22, 0.0),
                      s.b.a22 / m22});
  }
  if (zero_trend(b22mod, tol) != Trend::ToZero)
    throw Error(ErrorKind::NonConvergentRatio, "limit_boundary_fit", "no accumulation: |b22| does not tend to 0");

  static constexpr std::array<const char*, 5> kNames = {"h", "c", "d", "offset", "phase"};
  const std::size_t n = ratios.size();
  std::array<cd, 5> limit{};
  for (std::size_t r = 0; r < 5; ++r) {
    const cd x0 = ratios[n - 3][r], x1 = ratios[n - 2][r], x2 = ratios[n - 1][r];
    const cd e1 = detail::extrapolate(x0, x1, delta[n - 3], delta[n - 2]);
    const cd e2 = detail::extrapolate(x1, x2, delta[n - 2], delta[n - 1]);
    const double scale = std::max(1.0, std::abs(e2));
    const double step_late = std::abs(x2 - x1), step_early = std::abs(x1 - x0);
    const bool settling = step_late <= 1e-12 * scale || step_late < step_early;
    if (!settling || std::abs(e2 - e1) > tol.ratio_cauchy * scale)
      throw Error(ErrorKind::NonConvergentRatio, "limit_boundary_fit",
                  std::string("ratio '") + kNames[r] + "' fails the Cauchy test");
    limit[r] = e2;
  }
  fit.h = limit[0];
  fit.c = limit[1];
  fit.d = limit[2];
  fit.offset = limit[3].real();
  fit.beta = std::arg(limit[4]);

  // Homogeneous part of rho0 by a short blow-up.
  constexpr double eps = 1e-3;
  const double eps_k = std::pow(eps, k);
  auto rho_k = [&](cd z) { return nf.rho0(eps * z) / eps_k; };

  const auto s = sample(jmax);
  const double m22 = std::abs(s.b.a22);
  const cd unit = std::polar(1.0, fit.beta);
  std::vector<cd> disc;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y)
      if (x * x + y * y <= 4) disc.push_back(cd(0.5 * x, 0.5 * y));
  double worst = 0.0;
  for (const cd& z1 : disc)
    for (const cd& z2 : disc) {
      const Point xn = s.t + s.b * Point{z1, z2};
      const double scaled = (nf.rho(xn.z, xn.w.real()) - xn.w.imag()) / m22;
      const double model = rho_k(fit.c * z1 + fit.d * z2) - (unit * (fit.h * z1 + z2)).imag() - fit.offset;
      worst = std::max(worst, std::abs(scaled - model));
    }
  fit.residual = worst;
  return fit;
}

}  // namespace holoscale
