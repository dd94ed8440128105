// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"

using namespace holoscale;
namespace ts = testing_support;

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(std::abs(a.z - b.z), std::abs(a.w - b.w)); }

std::vector<Point> random_points(std::uint64_t seed, int n, double r, Point c = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  while (static_cast<int>(out.size()) < n) {
    const cd z(u(rng), u(rng)), w(u(rng), u(rng));
    if (std::abs(z) < 1.0 && std::abs(w) < 1.0) out.push_back({c.z + r * z, c.w + r * w});
  }
  return out;
}

}  // namespace

TEST(Frankel, IdentityIsTranslation) {
  const Point q{cd(0.1, 0.2), cd(-0.3, 0.1)};
  const auto s = frankel_scale(ts::identity_family(), q, 4);
  for (const auto& p : random_points(1, 50, 0.5)) EXPECT_LE(dist(s(p), p - q), 1e-15);
}

TEST(Frankel, BidiscClosedForm) {
  const auto fam = ts::bidisc_family();
  for (int j : {1, 6, 12}) {
    const auto s = frankel_scale(fam, {0.0, 0.0}, j);
    const double a = 1.0 - std::ldexp(1.0, -j);
    for (const auto& p : random_points(static_cast<std::uint64_t>(j), 1000, 0.9)) {
      const Point want{p.z, p.w / (1.0 - a * p.w)};
      EXPECT_LE(dist(s(p), want), 1e-12 * std::max(1.0, std::abs(want.w)));
    }
  }
}

TEST(Frankel, AnchorAndJacobianInvariants) {
  const std::vector<std::pair<MapFamily, Point>> cases = {
      {ts::identity_family(), {0.0, 0.0}},       {ts::bidisc_family(), {0.0, 0.0}},
      {ts::ball_family(), {0.0, 0.0}},           {ts::quartic_family(), {0.0, cd(0, 1)}},
      {ts::cex1_family(), {0.0, 0.0}},           {ts::cex2_family(), {0.0, 0.0}},
      {ts::bidisc_family(), {cd(0.2), cd(0.1, 0.3)}}};
  for (const auto& [fam, q] : cases)
    for (int j = 1; j <= 12; ++j) {
      const auto s = frankel_scale(fam, q, j);
      const Point at_q = s(q);
      EXPECT_LT(std::hypot(std::abs(at_q.z), std::abs(at_q.w)), 1e-12);
      EXPECT_LT(op_norm(s.jacobian(q) - Mat2::identity()), 1e-9);
    }
}

TEST(Frankel, CompositionMatchesDefinition) {
  const auto fam = ts::cex1_family();
  const Point q{0.0, 0.0};
  const auto s = frankel_scale(fam, q, 8);
  const Mat2 inv = jacobian(fam, 8, q).m.inverse();
  const Point fq = fam.apply(8, q);
  for (const auto& p : random_points(9, 1000, 0.3)) {
    const Point want = inv * (fam.apply(8, p) - fq);
    EXPECT_LE(dist(s(p), want), 1e-12 * std::max(1.0, std::hypot(std::abs(want.z), std::abs(want.w))));
  }
}

TEST(Frankel, DegenerateJacobian) {
  const auto fam = ts::frozen("z", "a*w", 0.0);
  try {
    frankel_scale(fam, {0.0, 0.0}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateJacobian);
  }
}

TEST(Variety, BidiscUsesCoordinateAxes) {
  const auto fam = ts::bidisc_family();
  for (int j : {3, 8, 12}) {
    const auto s = variety_scale(fam, {0.0, 0.0}, j);
    const double a = 1.0 - std::ldexp(1.0, -j);
    EXPECT_LT(op_norm(s.eigenvectors - Mat2::identity()), 1e-15);
    EXPECT_LT(op_norm(s.normalizer - Mat2::diag(1.0, 1.0 / (1.0 - a * a))), 1e-9 / (1.0 - a * a));
    for (const auto& p : random_points(4, 100, 0.9)) {
      const Point want{p.z, (p.w - a) / (1.0 - a * p.w) / (1.0 - a * a)};
      EXPECT_LE(dist(s(p), want), 1e-12 * std::max(1.0, std::abs(want.w)));
    }
  }
}

TEST(Variety, UpperTriangularStaysIndependent) {
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    auto fam = ts::frozen("z + w", "a*w", eps);
    const auto s = variety_scale(fam, {0.0, 0.0}, 1);
    const Mat2& rows = s.eigenvectors;
    // Rows have unit norm.
    EXPECT_NEAR(std::hypot(std::abs(rows.a11), std::abs(rows.a12)), 1.0, 1e-14);
    EXPECT_NEAR(std::hypot(std::abs(rows.a21), std::abs(rows.a22)), 1.0, 1e-14);
    // (1, 0) and (1, eps - 1)/norm, up to phase.
    const double nv = std::hypot(1.0, eps - 1.0);
    EXPECT_NEAR(std::abs(rows.det()), std::abs(eps - 1.0) / nv, 1e-12);
    EXPECT_GT(std::abs(rows.det()), 0.5);
  }
}

TEST(Variety, RepeatedEigenvalueIsDegenerate) {
  const auto fam = ts::frozen("z + w", "w", 0.0);
  try {
    variety_scale(fam, {0.0, 0.0}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateEigenvectors);
  }
}

TEST(Variety, StepDependsOnlyOnTheCurrentParameter) {
  // The closed-form schedule and an explicit list that disagrees before
  // j = 6 but matches afterwards give the same map at j_max.
  const auto a = ts::bidisc_family();
  auto b = a;
  b.schedule = {};
  for (int j = 1; j <= 12; ++j) b.schedule.values.push_back(j < 6 ? cd(0.1 * j) : cd(1.0 - std::ldexp(1.0, -j)));
  const auto sa = variety_scale(a, {0.0, 0.0}, 12);
  const auto sb = variety_scale(b, {0.0, 0.0}, 12);
  for (const auto& p : random_points(2, 200, 0.9)) {
    const Point x = sa(p), y = sb(p);
    EXPECT_LE(dist(x, y), 1e-6 * std::max(1.0, std::abs(x.w)));
  }
}

TEST(NormSup, Identity) {
  const auto pts = CompactGrid{{0.0, 0.0}, 0.5, 5, 2}.points();
  EXPECT_NEAR(norm_sup(ts::identity_family(), {0.0, 0.0}, 5, pts), 1.0, 1e-15);
}

TEST(NormSup, BidiscBoundedByFour) {
  const auto pts = CompactGrid{{0.0, 0.0}, 0.5, 7, 10}.points();
  const auto fam = ts::bidisc_family();
  for (int j = 1; j <= 14; ++j) {
    const double a = 1.0 - std::ldexp(1.0, -j);
    const double m = norm_sup(fam, {0.0, 0.0}, j, pts);
    EXPECT_LE(m, 4.0 + 1e-12);
    EXPECT_NEAR(m, 1.0 / std::pow(1.0 - 0.5 * a, 2), 1e-9);  // attained at w = 0.5
  }
}

TEST(NormSup, Cex1GrowsLikeInverseSquareRoot) {
  const auto pts = CompactGrid{{0.0, 0.0}, 0.3, 7, 10}.points();
  const auto fam = ts::cex1_family();
  std::vector<double> m;
  for (int j = 6; j <= 12; ++j) m.push_back(norm_sup(fam, {0.0, 0.0}, j, pts));
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < m.size(); ++k) {
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(m[k]));
  }
  const auto fit = fit_line(xs, ys);
  EXPECT_NEAR(fit.slope, std::log(2.0) / 2.0, 0.08);
  EXPECT_GT(fit.r2, 0.99);
}

TEST(Normality, Examples) {
  const std::vector<double> ones(6, 1.0);
  EXPECT_EQ(normality_diagnostic(ones), Normality::Bounded);
  const std::vector<double> too_short(5, 1.0);
  EXPECT_EQ(normality_diagnostic(too_short), Normality::Inconclusive);
  std::vector<double> growth;
  for (int k = 0; k < 7; ++k) growth.push_back(std::exp(0.35 * k));
  EXPECT_EQ(normality_diagnostic(growth), Normality::Unbounded);
  std::vector<double> slow;
  for (int k = 0; k < 7; ++k) slow.push_back(std::exp(0.1 * k) * (k % 2 ? 1.0 : 1.6));
  EXPECT_EQ(normality_diagnostic(slow), Normality::Inconclusive);
}

TEST(Normality, DichotomyOnCorpusFamilies) {
  auto verdict = [](const MapFamily& fam, Point q, double r) {
    const auto pts = CompactGrid{q, r, 7, 10}.points();
    std::vector<double> m;
    for (int j = 6; j <= 12; ++j) m.push_back(norm_sup(fam, q, j, pts));
    return normality_diagnostic(m);
  };
  EXPECT_EQ(verdict(ts::bidisc_family(), {0.0, 0.0}, 0.5), Normality::Bounded);
  EXPECT_EQ(verdict(ts::ball_family(), {0.0, 0.0}, 0.5), Normality::Bounded);
  EXPECT_EQ(verdict(ts::quartic_family(), {0.0, cd(0, 1)}, 0.5), Normality::Bounded);
  EXPECT_EQ(verdict(ts::cex1_family(), {0.0, 0.0}, 0.3), Normality::Unbounded);
  EXPECT_EQ(verdict(ts::cex2_family(), {0.0, 0.0}, 0.3), Normality::Unbounded);
}

TEST(Rtimes, Examples) {
  RtimesDomain flat{dsl::parse_expr("0"), {}};
  EXPECT_TRUE(rtimes_membership(flat, {0.0, cd(0, 1)}));
  EXPECT_FALSE(rtimes_membership(flat, {0.0, cd(0, -1)}));
  EXPECT_FALSE(rtimes_membership(flat, {1.5, cd(0, 1)}));
  RtimesDomain twisted{dsl::parse_expr("2*re(z)"), {}};
  EXPECT_TRUE(rtimes_membership(twisted, {0.785, -1.0}));
  EXPECT_FALSE(rtimes_membership(twisted, {0.0, -1.0}));
}

TEST(ModelAction, Examples) {
  RtimesDomain flat{dsl::parse_expr("0"), {}};
  const Point half = model_action(ModelAction::Ln, 2.0, {0.0, cd(0, 2)});
  EXPECT_EQ(half.w, cd(0, 1));
  EXPECT_TRUE(flat.contains(half));

  auto quartic = [](const Point& p) { return p.w.imag() > std::pow(std::abs(p.z), 4); };
  const Point p{0.5, cd(0.1, 0.2)};
  EXPECT_TRUE(quartic(p));
  const Point moved = model_action(ModelAction::TranslateT, 5.0, p);
  EXPECT_EQ(moved.w, cd(5.1, 0.2));
  EXPECT_TRUE(quartic(moved));

  double prev = 1.0;
  for (double t : {1.0, 5.0, 20.0, 60.0}) {
    const Point d = model_action(ModelAction::DilateT, t, {0.0, cd(0, 1)});
    EXPECT_TRUE(flat.contains(d));
    EXPECT_LT(d.w.imag(), prev);
    prev = d.w.imag();
  }
  EXPECT_LT(prev, 1e-25);
}

TEST(ModelAction, ClosureOnRandomMembers) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<RtimesDomain> domains = {RtimesDomain{dsl::parse_expr("0"), {}},
                                             RtimesDomain{dsl::parse_expr("2*re(z) - im(z)"), {}}};
  const double params[] = {0.5, 1.0, 2.0, 7.5, 40.0};
  for (std::size_t di = 0; di < domains.size(); ++di) {
    const auto& d = domains[di];
    int members = 0;
    while (members < 1000) {
      const Point p{cd(u(rng), u(rng)), 3.0 * cd(u(rng), u(rng))};
      if (!d.contains(p)) continue;
      ++members;
      for (double t : params) {
        EXPECT_TRUE(d.contains(model_action(ModelAction::Ln, t, p)));
        EXPECT_TRUE(d.contains(model_action(ModelAction::DilateT, t, p)));
        // Real translation preserves only the untwisted half-plane.
        if (di == 0) {
          EXPECT_TRUE(d.contains(model_action(ModelAction::TranslateT, t, p)));
        }
      }
    }
  }
  // Translation also preserves {Im w > |z|^4}.
  int members = 0;
  while (members < 1000) {
    const Point p{cd(u(rng), u(rng)), 2.0 * cd(u(rng), u(rng))};
    if (!(p.w.imag() > std::pow(std::abs(p.z), 4))) continue;
    ++members;
    for (double t : params) {
      const Point m = model_action(ModelAction::TranslateT, t, p);
      EXPECT_GT(m.w.imag(), std::pow(std::abs(m.z), 4));
    }
  }
}
