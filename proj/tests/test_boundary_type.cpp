// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"

using namespace holoscale;
namespace ts = testing_support;

namespace {

NormalForm from_rho(const std::string& rho, double radius = 1.0) {
  return NormalForm::from_defining(ts::defining(rho, radius));
}

std::function<double(const Point&)> real_fn(const std::string& src) {
  return detail::real_part_of(dsl::parse_expr(src));
}

// m_z of exp(-1/|z|^p) for a ratio of modulus |a|.
double exact_mz(double p, double r, double a) {
  return std::pow(r, -p) * (std::pow(a, -p) - 1.0) / std::log(1.0 / a);
}

}  // namespace

// ---------------------------------------------------------------------------
// Normal form

TEST(NormalForm, BallAtNorthPole) {
  const auto nf = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {0.0, cd(0, 1)});
  EXPECT_LT(std::hypot(std::abs(nf.translation.z), std::abs(nf.translation.w - cd(0, 1))), 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int k = 0; k < 300; ++k) {
    const cd z(u(rng), u(rng));
    const double re_w = 0.5 * u(rng);
    if (std::norm(z) + re_w * re_w > 0.7) continue;
    const double want = 1.0 - std::sqrt(1.0 - std::norm(z) - re_w * re_w);
    EXPECT_NEAR(nf.rho(z, re_w), want, 1e-10);
  }
  // Leading coefficient 1/2 of |z|^2, next term r^2/8.
  for (double r : {1e-2, 3e-3}) EXPECT_NEAR(nf.rho0(cd(r, 0.0)) / (r * r) - r * r / 8.0, 0.5, 1e-6);
}

TEST(NormalForm, RapidlyFlatDomain) {
  const auto nf = normal_form(real_fn("abs(w)^2 + exp(-1/abs(z)^2) - 1"), {0.0, cd(0, 1)});
  for (double r : {0.3, 0.5, 0.7})
    for (double re_w : {0.0, 0.2}) {
      const cd z = std::polar(r, 0.7);
      const double e = std::exp(-1.0 / (r * r));
      EXPECT_NEAR(nf.rho(z, re_w), 1.0 - std::sqrt(1.0 - e - re_w * re_w), 1e-10);
    }
  EXPECT_EQ(nf.rho0(0.0), 0.0);
}

TEST(NormalForm, HalfSpaceIsAlreadyNormal) {
  const auto nf = normal_form(real_fn("-im(w)"), {0.0, 0.0});
  EXPECT_LT(op_norm(nf.frame - Mat2::identity()), 1e-12);
  EXPECT_EQ(nf.translation.z, cd(0.0));
  EXPECT_EQ(nf.translation.w, cd(0.0));
  for (double r : {0.1, 0.4}) EXPECT_LT(std::abs(nf.rho(cd(r, -r), 0.3)), 1e-12);
}

TEST(NormalForm, TranslationAndFrameRoundTrip) {
  const auto nf = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {-1.0, 0.0});
  // Unitary frame, base point to the origin, inward normal to +Im w.
  EXPECT_LT(op_norm(nf.frame * nf.frame.adjoint() - Mat2::identity()), 1e-12);
  const Point o = nf.to_normal({-1.0, 0.0});
  EXPECT_LT(std::hypot(std::abs(o.z), std::abs(o.w)), 1e-15);
  const Point inside = nf.to_normal({-0.9, 0.0});
  EXPECT_NEAR(inside.w.imag(), 0.1, 1e-12);
  const Point back = nf.from_normal(inside);
  EXPECT_LT(std::hypot(std::abs(back.z + 0.9), std::abs(back.w)), 1e-15);
}

TEST(NormalForm, IdempotentUpToDiagonalFrame) {
  const auto first = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {0.0, cd(0, 1)});
  auto normalized = [first](const Point& x) { return first.rho(x.z, x.w.real()) - x.w.imag(); };
  const auto second = normal_form(normalized, {0.0, 0.0});
  EXPECT_LT(std::hypot(std::abs(second.translation.z), std::abs(second.translation.w)), 1e-9);
  EXPECT_LT(std::abs(second.frame.a12), 1e-9);
  EXPECT_LT(std::abs(second.frame.a21), 1e-9);
  EXPECT_NEAR(std::abs(second.frame.a11), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(second.frame.a22), 1.0, 1e-9);
  for (double r : {0.1, 0.3}) EXPECT_NEAR(second.rho0(cd(r, r)), first.rho0(cd(r, r)), 1e-9);
}

TEST(NormalForm, Errors) {
  try {
    normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {0.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
  }
  try {
    normal_form(real_fn("(abs(w)^2 - 1)^2"), {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGradient);
  }
}

// ---------------------------------------------------------------------------
// Order of vanishing

TEST(Vanishing, Examples) {
  EXPECT_EQ(vanishing_order([](double x) { return x * x * x; }).order, 3);
  EXPECT_EQ(vanishing_order([](double x) { return x * x + std::pow(x, 5); }).order, 2);
  const auto flat = vanishing_order([](double x) { return std::exp(-1.0 / (x * x)); });
  EXPECT_TRUE(flat.infinite);
  EXPECT_GE(flat.order, 16);
  const auto flat_log = vanishing_order_log([](double x) { return -1.0 / (x * x); });
  EXPECT_TRUE(flat_log.infinite);
}

TEST(Vanishing, ProductsAdd) {
  const std::vector<std::pair<std::function<double(double)>, int>> fns = {
      {[](double x) { return x * x; }, 2},
      {[](double x) { return std::pow(x, 4); }, 4},
      {[](double x) { return 1.0 - std::sqrt(1.0 - x * x); }, 2},
      {[](double x) { return std::sin(x) * x * x; }, 3},
      {[](double x) { return x + x * x; }, 1}};
  for (const auto& [f, nf] : fns) {
    EXPECT_EQ(vanishing_order(f).order, nf);
    for (const auto& [g, ng] : fns)
      EXPECT_EQ(vanishing_order([&](double x) { return f(x) * g(x); }).order, nf + ng);
  }
}

TEST(Vanishing, UnderflowIsNoiseFloor) {
  try {
    vanishing_order([](double) { return 0.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoiseFloor);
  }
}

// ---------------------------------------------------------------------------
// Type search

TEST(Type, QuadricIsTwo) {
  const auto rep = dangelo_type(from_rho("abs(z)^2"));
  EXPECT_EQ(rep.kind, TypeKind::Finite);
  EXPECT_EQ(rep.t_estimate, 2.0);
  EXPECT_TRUE(rep.witness.second_is_zero());
  EXPECT_EQ(rep.witness.order(), 1);
  EXPECT_TRUE(rep.exhausted);
  EXPECT_GT(rep.discs_tested, 30000u);
}

TEST(Type, QuarticIsFour) {
  const auto rep = dangelo_type(from_rho("abs(z)^4"));
  EXPECT_EQ(rep.kind, TypeKind::Finite);
  EXPECT_EQ(rep.t_estimate, 4.0);
  EXPECT_TRUE(rep.witness.second_is_zero());
}

TEST(Type, BallNormalFormIsTwo) {
  const auto nf = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {0.0, cd(0, 1)});
  DiscSearch small;
  small.step = 0.5;
  small.modulus = 1.0;
  const auto rep = dangelo_type(nf, small);
  EXPECT_EQ(rep.kind, TypeKind::Finite);
  EXPECT_EQ(rep.t_estimate, 2.0);
}

TEST(Type, FlatFunctionIsNotFinite) {
  const auto rep = dangelo_type(from_rho("exp(-1/abs(z)^2)"));
  EXPECT_NE(rep.kind, TypeKind::Finite);
  EXPECT_TRUE(std::isinf(rep.t_estimate));
  const auto full = classify_type(from_rho("exp(-1/abs(z)^2)"));
  EXPECT_EQ(full.kind, TypeKind::InfiniteTypeI);
}

TEST(Type, MonotoneInSearchBreadth) {
  // Every breadth includes (xi, 0), which already gives 6.
  const auto nf = from_rho("abs(z)^6 + u^2");
  DiscSearch narrow;
  narrow.degree = 1;
  narrow.max_monomial = 1;
  DiscSearch mid;
  mid.degree = 2;
  mid.step = 0.5;
  mid.modulus = 1.0;
  mid.max_monomial = 3;
  DiscSearch wide;
  wide.step = 0.5;
  wide.modulus = 1.0;
  const double t0 = dangelo_type(nf, narrow).t_estimate;
  const double t1 = dangelo_type(nf, mid).t_estimate;
  const double t2 = dangelo_type(nf, wide).t_estimate;
  EXPECT_LE(t0, t1);
  EXPECT_LE(t1, t2);
  EXPECT_EQ(t0, 6.0);
}

// ---------------------------------------------------------------------------
// Infinite type I

TEST(TypeI, ExactExponentExample) {
  const auto log_rho = [](cd z) { return -1.0 / std::norm(z); };
  EXPECT_NEAR(mz_estimate(log_rho, 0.1, 0.5), 300.0 / std::log(2.0), 1e-9);
  EXPECT_NEAR(mz_estimate(log_rho, 0.1, 0.5), 432.8, 0.05);
}

TEST(TypeI, GaussianFlatnessQuadruples) {
  const auto res = type_I_classifier([](cd z) { return -1.0 / std::norm(z); });
  EXPECT_EQ(res.kind, TypeKind::InfiniteTypeI);
  ASSERT_EQ(res.m_z_samples.size(), 4u);
  for (const auto& [r, mz] : res.m_z_samples) EXPECT_NEAR(mz, exact_mz(2.0, r, 0.9), 1e-9 * mz);
  EXPECT_NEAR(res.m_z_samples[0].second, 55.7, 0.1);
}

TEST(TypeI, ExponentialFlatnessDoubles) {
  const auto res = type_I_classifier([](cd z) { return -1.0 / std::abs(z); });
  EXPECT_EQ(res.kind, TypeKind::InfiniteTypeI);
  for (const auto& [r, mz] : res.m_z_samples) EXPECT_NEAR(mz, exact_mz(1.0, r, 0.9), 1e-9 * mz);
}

TEST(TypeI, SlowFlatnessIsTypeTwoSuspect) {
  // log rho = -(log 1/|z|)^2: infinite order, but m_z grows only logarithmically.
  const auto res = type_I_classifier([](cd z) {
    const double l = std::log(std::abs(z));
    return -l * l;
  });
  EXPECT_EQ(res.kind, TypeKind::InfiniteTypeII_suspect);
}

TEST(TypeI, FiniteTypeIsRejected) {
  try {
    type_I_classifier([](cd z) { return 4.0 * std::log(std::abs(z)); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
  }
}

TEST(TypeI, ScalarAndRotationInvariance) {
  Tolerances tol;
  auto base = [](cd z) { return -1.0 / std::norm(z) + std::log(1.0 + 0.2 * z.real() / std::abs(z)); };
  const auto ref = type_I_classifier(base);
  for (double c : {1e-3, 7.0}) {
    const auto scaled = type_I_classifier([&](cd z) { return base(z) + std::log(c); });
    EXPECT_EQ(scaled.kind, ref.kind);
    for (std::size_t k = 0; k < ref.m_z_samples.size(); ++k)
      EXPECT_NEAR(scaled.m_z_samples[k].second, ref.m_z_samples[k].second, 1e-9 * ref.m_z_samples[k].second);
  }
  for (double phi : {0.3, 1.7, 4.0}) {
    const auto rotated = type_I_classifier([&](cd z) { return base(std::polar(1.0, phi) * z); });
    EXPECT_EQ(rotated.kind, ref.kind);
    for (std::size_t k = 0; k < ref.m_z_samples.size(); ++k)
      EXPECT_LT(std::abs(rotated.m_z_samples[k].second / ref.m_z_samples[k].second - 1.0), tol.mz);
  }
}

// ---------------------------------------------------------------------------
// Collapse

namespace {

std::vector<Point> unit_grid() {
  std::vector<Point> g;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0})
    for (double y : {-1.0, 0.0, 1.0}) g.push_back({cd(x), cd(y)});
  return g;
}

std::vector<double> powers(int jmax) {
  std::vector<double> v;
  for (int j = 1; j <= jmax; ++j) v.push_back(std::ldexp(1.0, -j));
  return v;
}

}  // namespace

TEST(Collapse, FlatFunctionCollapses) {
  const auto b = powers(12);
  const auto grid = unit_grid();
  const auto res = collapse_check([](cd z) { return -1.0 / std::norm(z); }, b, b, b, grid);
  // Largest |b11 z + b12 w| = 2^-11 at z = w = 1.
  EXPECT_NEAR(res.log_sup.back(), -std::ldexp(1.0, 22) + 12.0 * std::log(2.0), 1e-6);
  EXPECT_LT(res.sup_at_jmax, 1e-300);
  EXPECT_LT(res.sup_at_jmax, Tolerances{}.collapse);
  for (std::size_t k = 1; k < res.log_sup.size(); ++k) EXPECT_LE(res.log_sup[k], res.log_sup[k - 1]);
}

TEST(Collapse, QuadricControlDecaysSlowly) {
  const auto b = powers(12);
  const auto grid = unit_grid();
  const auto res = collapse_check([](cd z) { return 2.0 * std::log(std::abs(z)); }, b, b, b, grid);
  for (std::size_t k = 0; k < res.js.size(); ++k)
    EXPECT_NEAR(res.log_sup[k], std::log(4.0 * std::ldexp(1.0, -res.js[k])), 1e-12);
  EXPECT_NEAR(res.sup_at_jmax, 4.0 / 4096.0, 1e-15);
}

TEST(Collapse, ZeroFunction) {
  const auto b = powers(6);
  const auto grid = unit_grid();
  const auto res = collapse_check([](cd) { return -std::numeric_limits<double>::infinity(); }, b, b, b, grid);
  EXPECT_EQ(res.sup_at_jmax, 0.0);
}

// ---------------------------------------------------------------------------
// Limit boundary fit

TEST(LimitFit, BallGivesSiegelForm) {
  const auto nf = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {-1.0, 0.0});
  const auto fit = limit_boundary_fit(ts::ball_family(), {0.0, 0.0}, nf, 2, 6, 12);
  EXPECT_LT(std::abs(fit.h), 1e-6);
  EXPECT_NEAR(std::abs(fit.c), 1.0, 1e-6);
  EXPECT_LT(std::abs(fit.d), 1e-6);
  EXPECT_NEAR(fit.offset, 0.5, 1e-6);
  EXPECT_LT(fit.residual, 1e-3);
}

TEST(LimitFit, IdentityDoesNotConverge) {
  const auto nf = normal_form(real_fn("abs(z)^2 + abs(w)^2 - 1"), {-1.0, 0.0});
  try {
    limit_boundary_fit(ts::identity_family(), {0.0, 0.0}, nf, 2, 6, 12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergentRatio);
  }
}

TEST(LimitFit, BidiscDoesNotConverge) {
  const auto nf = normal_form(real_fn("abs(w)^2 - 1"), {0.0, -1.0});
  for (int k : {2, 4}) {
    try {
      limit_boundary_fit(ts::bidisc_family(), {0.0, 0.0}, nf, k, 6, 12);
      FAIL() << "k = " << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NonConvergentRatio);
    }
  }
}
