// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "holoscale/dsl/config.hpp"
#include "holoscale/dual.hpp"
#include "holoscale/grid.hpp"
#include "holoscale/linalg.hpp"

namespace holoscale {

using dsl::MapFamily;
using dsl::Tolerances;

/// Jacobian [[df/dz, df/dw], [dg/dz, dg/dw]] of a holomorphic map at a point.
struct Jacobian2 {
  Mat2 m;
  Point at;

  cd det() const { return m.det(); }
  cd trace() const { return m.trace(); }
};

// ---------------------------------------------------------------------------
// Differentiation

/// Exact partials of (f, g) at p by forward-mode dual arithmetic.
inline Mat2 jacobian_of(const dsl::Expr& f, const dsl::Expr& g, const Point& p, cd a = 0.0, double j = 0.0) {
  using D = Dual<2>;
  dsl::BasicBindings<D> b;
  b.set(dsl::Var::Z, D::variable(p.z, 0))
      .set(dsl::Var::W, D::variable(p.w, 1))
      .set(dsl::Var::A, D(a))
      .set(dsl::Var::J, D(cd(j, 0.0)));
  const D fv = f.evaluate<D>(b);
  const D gv = g.evaluate<D>(b);
  return {fv.d[0], fv.d[1], gv.d[0], gv.d[1]};
}

inline Jacobian2 jacobian(const MapFamily& fam, int j, const Point& p) {
  return {jacobian_of(fam.f, fam.g, p, fam.alpha(j), static_cast<double>(j)), p};
}

/// Central complex differences with one Richardson step; an oracle that is
/// independent of the dual-number path.
inline Mat2 jacobian_fd(const MapFamily& fam, int j, const Point& p, double h = 1e-5) {
  auto central = [&](double step, bool along_z) {
    const Point e = along_z ? Point{step, 0.0} : Point{0.0, step};
    const Point fp = fam.apply(j, p + e);
    const Point fm = fam.apply(j, p - e);
    return Point{(fp.z - fm.z) / (2.0 * step), (fp.w - fm.w) / (2.0 * step)};
  };
  auto richardson = [&](bool along_z) {
    const Point d1 = central(h, along_z);
    const Point d2 = central(h / 2.0, along_z);
    return Point{(4.0 * d2.z - d1.z) / 3.0, (4.0 * d2.w - d1.w) / 3.0};
  };
  const Point dz = richardson(true);
  const Point dw = richardson(false);
  return {dz.z, dw.z, dz.w, dw.w};
}

// ---------------------------------------------------------------------------
// Eigenvalues

/// Lexicographic comparison on (|x|, Re x, Im x); components that agree to
/// a relative 1e-12 count as ties so rounding cannot flip the order.
inline bool succeeds(cd x, cd y) {
  auto differ = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
  const double mx = std::abs(x), my = std::abs(y);
  if (differ(mx, my)) return mx > my;
  if (differ(x.real(), y.real())) return x.real() > y.real();
  if (differ(x.imag(), y.imag())) return x.imag() > y.imag();
  return false;
}

/// Eigenvalues of a 2x2 Jacobian ordered lambda1 >= lambda2.
struct EigenPair {
  cd lambda1{};
  cd lambda2{};
  bool degenerate = false;
};

inline EigenPair eigenpair(const Mat2& m, double degenerate_tol = 1e-9) {
  const cd tr = m.trace();
  const cd det = m.det();
  const cd disc = tr * tr - 4.0 * det;
  const cd s = std::sqrt(disc);
  // Larger-modulus root first, the other from Vieta to avoid cancellation.
  const cd big = std::abs(tr + s) >= std::abs(tr - s) ? (tr + s) / 2.0 : (tr - s) / 2.0;
  const cd small = big == cd{} ? cd{} : det / big;
  EigenPair e;
  e.lambda1 = big;
  e.lambda2 = small;
  if (succeeds(e.lambda2, e.lambda1)) std::swap(e.lambda1, e.lambda2);
  e.degenerate = std::abs(disc) < degenerate_tol;
  return e;
}

/// Unit eigenvectors as the rows of a matrix, first row for lambda1.
/// Phase gauge: the largest-modulus component is real and positive.
inline Mat2 eigenvector_rows(const Mat2& m, const EigenPair& e) {
  auto vec = [&](cd lambda, bool second) -> std::array<cd, 2> {
    if (m.a12 == cd{} && m.a21 == cd{} && m.a11 == m.a22) {
      return second ? std::array<cd, 2>{0.0, 1.0} : std::array<cd, 2>{1.0, 0.0};
    }
    std::array<cd, 2> v1{m.a12, lambda - m.a11};
    std::array<cd, 2> v2{lambda - m.a22, m.a21};
    const double n1 = std::hypot(std::abs(v1[0]), std::abs(v1[1]));
    const double n2 = std::hypot(std::abs(v2[0]), std::abs(v2[1]));
    auto v = n1 >= n2 ? v1 : v2;
    const double nv = std::max(n1, n2);
    if (nv == 0.0) return {0.0, 0.0};
    v[0] /= nv;
    v[1] /= nv;
    const cd big = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
    const cd phase = std::conj(big) / std::abs(big);
    return {v[0] * phase, v[1] * phase};
  };
  const auto u = vec(e.lambda1, false);
  const auto v = vec(e.lambda2, true);
  return {u[0], u[1], v[0], v[1]};
}

// ---------------------------------------------------------------------------
// Eigenvalue fields and the Cauchy-Riemann residual

/// Eigenvalues sampled on a tensor grid, with the E-locus masked.
struct EigenField {
  TensorGrid grid;
  std::vector<TensorGrid::Node> nodes;
  std::vector<EigenPair> values;
  std::vector<bool> degenerate_mask;
  std::function<EigenPair(const Point&)> sampler;
};

inline EigenField sample_eigen_field(std::function<Mat2(const Point&)> jac, const TensorGrid& grid,
                                     double degenerate_tol = 1e-9) {
  EigenField field;
  field.grid = grid;
  field.nodes = grid.nodes();
  field.sampler = [jac = std::move(jac), degenerate_tol](const Point& p) { return eigenpair(jac(p), degenerate_tol); };
  field.values.reserve(field.nodes.size());
  field.degenerate_mask.reserve(field.nodes.size());
  for (const auto& n : field.nodes) {
    const auto e = field.sampler(n.p);
    field.values.push_back(e);
    field.degenerate_mask.push_back(e.degenerate);
  }
  return field;
}

inline EigenField sample_eigen_field(const MapFamily& fam, int j, const TensorGrid& grid, double degenerate_tol = 1e-9) {
  return sample_eigen_field([&fam, j](const Point& p) { return jacobian(fam, j, p).m; }, grid, degenerate_tol);
}

namespace detail {

inline void require_grid(const TensorGrid& grid, const std::vector<TensorGrid::Node>& nodes,
                         const std::vector<bool>& usable) {
  if (grid.n < 3) throw Error(ErrorKind::InsufficientGrid, "cr_residual", "fewer than 3 nodes per axis");
  for (int axis = 0; axis < 4; ++axis) {
    std::vector<bool> seen(static_cast<std::size_t>(grid.n), false);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (usable[k]) seen[static_cast<std::size_t>(nodes[k].index[static_cast<std::size_t>(axis)])] = true;
    if (std::count(seen.begin(), seen.end(), true) < 3)
      throw Error(ErrorKind::InsufficientGrid, "cr_residual", "fewer than 3 unmasked points on an axis");
  }
}

inline const std::array<Point, 4>& real_directions() {
  static const std::array<Point, 4> dirs = {Point{cd(1, 0), 0.0}, Point{cd(0, 1), 0.0}, Point{0.0, cd(1, 0)},
                                            Point{0.0, cd(0, 1)}};
  return dirs;
}

}  // namespace detail

/// Central-difference estimate of |d/dzbar| + |d/dwbar| of a scalar field at
/// one point, step h along each real axis.
inline double cr_defect(const std::function<cd(const Point&)>& field, const Point& p, double h) {
  const auto& dirs = detail::real_directions();
  std::array<cd, 4> d{};
  for (int k = 0; k < 4; ++k) d[k] = (field(p + h * dirs[k]) - field(p - h * dirs[k])) / (2.0 * h);
  const cd dzbar = 0.5 * (d[0] + cd(0, 1) * d[1]);
  const cd dwbar = 0.5 * (d[2] + cd(0, 1) * d[3]);
  return std::abs(dzbar) + std::abs(dwbar);
}

/// Max Cauchy-Riemann defect of a scalar field over a tensor grid.
inline double cr_residual(const TensorGrid& grid, const std::function<cd(const Point&)>& field, double spacing) {
  const auto nodes = grid.nodes();
  detail::require_grid(grid, nodes, std::vector<bool>(nodes.size(), true));
  double worst = 0.0;
  for (const auto& n : nodes) worst = std::max(worst, cr_defect(field, n.p, spacing));
  return worst;
}

struct CrResidual {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::size_t points_used = 0;
};

/// Cauchy-Riemann residual of both eigenvalue branches, central differences
/// with step `spacing` around every grid node. Stencil values are
/// matched to the centre's branches by proximity, so the pointwise order
/// switching across |lambda1| = |lambda2| does not register as a defect.
/// Points on or next to the degenerate locus are skipped.
inline CrResidual cr_residual(const EigenField& field, double spacing) {
  const auto& dirs = detail::real_directions();
  std::vector<bool> usable(field.nodes.size(), false);
  CrResidual out;
  for (std::size_t k = 0; k < field.nodes.size(); ++k) {
    if (field.degenerate_mask[k]) continue;
    const auto& c = field.values[k];
    const double gap = std::abs(c.lambda1 - c.lambda2);
    std::array<std::array<cd, 2>, 8> st{};
    bool ok = true;
    for (int d = 0; d < 4 && ok; ++d) {
      for (int s = 0; s < 2; ++s) {
        const Point p = field.nodes[k].p + (s == 0 ? spacing : -spacing) * dirs[static_cast<std::size_t>(d)];
        const auto e = field.sampler(p);
        if (e.degenerate) {
          ok = false;
          break;
        }
        const double keep = std::abs(e.lambda1 - c.lambda1) + std::abs(e.lambda2 - c.lambda2);
        const double swap = std::abs(e.lambda1 - c.lambda2) + std::abs(e.lambda2 - c.lambda1);
        // A displacement comparable to the branch gap makes matching ambiguous.
        if (std::min(keep, swap) > 0.25 * gap) {
          ok = false;
          break;
        }
        st[static_cast<std::size_t>(2 * d + s)] =
            keep <= swap ? std::array<cd, 2>{e.lambda1, e.lambda2} : std::array<cd, 2>{e.lambda2, e.lambda1};
      }
    }
    if (!ok) continue;
    usable[k] = true;
    ++out.points_used;
    for (int branch = 0; branch < 2; ++branch) {
      std::array<cd, 4> d{};
      for (int a = 0; a < 4; ++a)
        d[static_cast<std::size_t>(a)] =
            (st[static_cast<std::size_t>(2 * a)][static_cast<std::size_t>(branch)] -
             st[static_cast<std::size_t>(2 * a + 1)][static_cast<std::size_t>(branch)]) /
            (2.0 * spacing);
      const double defect = std::abs(0.5 * (d[0] + cd(0, 1) * d[1])) + std::abs(0.5 * (d[2] + cd(0, 1) * d[3]));
      double& slot = branch == 0 ? out.lambda1 : out.lambda2;
      slot = std::max(slot, defect);
    }
  }
  detail::require_grid(field.grid, field.nodes, usable);
  return out;
}

// ---------------------------------------------------------------------------
// Case dichotomy

enum class Trend { ToZero, BoundedAway, Inconclusive };

constexpr std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::ToZero: return "ToZero";
    case Trend::BoundedAway: return "BoundedAway";
    case Trend::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Least-squares slope and coefficient of determination of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

/// "-> 0" test on |lambda_j| over a j window: geometric decay over the last
/// five indices (strictly decreasing, log-slope <= -tol.zero_trend) means
/// ToZero; a window that stays above tol.zero within a factor of two is
/// BoundedAway; anything else is Inconclusive.
inline Trend zero_trend(std::span<const double> moduli, const Tolerances& tol) {
  const std::size_t n = moduli.size();
  const std::size_t w = std::min<std::size_t>(5, n);
  if (w < 3) return Trend::Inconclusive;
  std::vector<double> xs, ys;
  bool strictly_decreasing = true;
  for (std::size_t k = n - w; k < n; ++k) {
    if (k > n - w && !(moduli[k] < moduli[k - 1])) strictly_decreasing = false;
    if (!(moduli[k] > 0.0)) return Trend::ToZero;  // exact zero reached
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(moduli[k]));
  }
  const auto fit = fit_line(xs, ys);
  if (strictly_decreasing && fit.slope <= -tol.zero_trend && fit.r2 > 0.95) return Trend::ToZero;
  const auto [lo, hi] = std::minmax_element(moduli.begin() + static_cast<std::ptrdiff_t>(n - w), moduli.end());
  if (*lo > tol.zero && *hi < 2.0 * *lo) return Trend::BoundedAway;
  return Trend::Inconclusive;
}

enum class Case { AccumulationPoint, AccumulationVariety, Compact };

constexpr std::string_view to_string(Case c) {
  switch (c) {
    case Case::AccumulationPoint: return "AccumulationPoint";
    case Case::AccumulationVariety: return "AccumulationVariety";
    case Case::Compact: return "Compact";
  }
  return "?";
}

struct CaseReport {
  Case kind = Case::Compact;
  std::vector<int> js;
  std::vector<EigenPair> eigen;  // at q, one per j
  Trend trend1 = Trend::Inconclusive;
  Trend trend2 = Trend::Inconclusive;
};

inline CaseReport classify_case(const MapFamily& fam, const Point& q, int jmin, int jmax, const Tolerances& tol = {}) {
  CaseReport r;
  std::vector<double> m1, m2;
  for (int j = jmin; j <= jmax; ++j) {
    const auto e = eigenpair(jacobian(fam, j, q).m, tol.eig_degenerate);
    r.js.push_back(j);
    r.eigen.push_back(e);
    m1.push_back(std::abs(e.lambda1));
    m2.push_back(std::abs(e.lambda2));
  }
  r.trend1 = zero_trend(m1, tol);
  r.trend2 = zero_trend(m2, tol);
  if (r.trend1 == Trend::Inconclusive || r.trend2 == Trend::Inconclusive)
    throw Error(ErrorKind::Inconclusive, "classify_case",
                "eigenvalue trend over j in [" + std::to_string(jmin) + ", " + std::to_string(jmax) +
                    "] is neither geometric decay nor bounded away from zero");
  const int vanishing = (r.trend1 == Trend::ToZero) + (r.trend2 == Trend::ToZero);
  r.kind = vanishing == 2 ? Case::AccumulationPoint : vanishing == 1 ? Case::AccumulationVariety : Case::Compact;
  return r;
}

// ---------------------------------------------------------------------------
// Determinant ratio bounds

struct DetRatioBounds {
  double min = INFINITY;
  double max = 0.0;
  std::vector<double> min_per_j;
  std::vector<double> max_per_j;
  bool violation_suspected = false;
};

/// Bounds of |det((J phi_j(q))^-1 J phi_j(p))| over a compact sample set.
inline DetRatioBounds det_ratio_bounds(const MapFamily& fam, const Point& q, std::span<const Point> grid, int jmin,
                                       int jmax, const Tolerances& tol = {}) {
  DetRatioBounds b;
  for (int j = jmin; j <= jmax; ++j) {
    const cd dq = jacobian(fam, j, q).det();
    if (std::abs(dq) < tol.det_degenerate)
      throw Error(ErrorKind::DegenerateJacobian, "det_ratio_bounds", "at q, j=" + std::to_string(j));
    double lo = INFINITY, hi = 0.0;
    for (const auto& p : grid) {
      const cd dp = jacobian(fam, j, p).det();
      if (std::abs(dp) < tol.det_degenerate)
        throw Error(ErrorKind::DegenerateJacobian, "det_ratio_bounds", "on the grid, j=" + std::to_string(j));
      const double r = std::abs(dp / dq);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    b.min_per_j.push_back(lo);
    b.max_per_j.push_back(hi);
    b.min = std::min(b.min, lo);
    b.max = std::max(b.max, hi);
  }
  // A sustained geometric trend of either bound toward 0 or infinity.
  if (b.min_per_j.size() >= 3) {
    std::vector<double> xs, lmin, lmax;
    for (std::size_t k = 0; k < b.min_per_j.size(); ++k) {
      xs.push_back(static_cast<double>(k));
      lmin.push_back(std::log(b.min_per_j[k]));
      lmax.push_back(std::log(b.max_per_j[k]));
    }
    const auto fmin = fit_line(xs, lmin);
    const auto fmax = fit_line(xs, lmax);
    b.violation_suspected = (fmin.slope < -tol.zero_trend && fmin.r2 > 0.9) ||
                            (fmax.slope > tol.zero_trend && fmax.r2 > 0.9);
  }
  return b;
}

}  // namespace holoscale
