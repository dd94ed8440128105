// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "holoscale/holo_diff.hpp"
#include "holoscale/scaling.hpp"

namespace holoscale {

/// Unit representative of a point of CP^2.
using Triple = std::array<cd, 3>;

enum class Label : std::uint8_t { Interior, Boundary };

constexpr std::string_view to_string(Label l) { return l == Label::Interior ? "interior" : "boundary"; }

struct CloudCP2 {
  std::vector<Triple> points;
  std::vector<Label> labels;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// (z, w) -> [1, z, w] / |(1, z, w)|.
inline Triple embed(const Point& p) {
  if (!is_finite(p)) throw Error(ErrorKind::NonFinite, "embed", "non-finite coordinates");
  const double n = std::sqrt(1.0 + std::norm(p.z) + std::norm(p.w));
  return {cd(1.0 / n, 0.0), p.z / n, p.w / n};
}

inline cd inner(const Triple& a, const Triple& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

/// Fubini-Study distance arccos |<p, q>| in a cancellation-free form.
/// Arguments are put in a fixed order first so the result is exactly symmetric.
inline double fs_dist(const Triple& a, const Triple& b) {
  if (a == b) return 0.0;
  auto key = [](const Triple& t) {
    return std::array<double, 6>{t[0].real(), t[0].imag(), t[1].real(), t[1].imag(), t[2].real(), t[2].imag()};
  };
  const bool ordered = key(a) < key(b);
  const Triple& p = ordered ? a : b;
  const Triple& q = ordered ? b : a;
  const cd ip = inner(p, q);
  // Component of q orthogonal to p.
  double perp2 = 0.0;
  for (int k = 0; k < 3; ++k) perp2 += std::norm(q[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k)] * ip);
  if (perp2 == 0.0) return 0.0;
  return std::atan2(std::sqrt(perp2), std::abs(ip));
}

/// Directed sup-inf distance from A to B.
inline double directed_hausdorff(const CloudCP2& a, const CloudCP2& b) {
  double worst = 0.0;
  for (const auto& x : a.points) {
    // 1 - |<x, y>|^2 = sin^2 of the distance; the argmin is shared.
    double best = std::numeric_limits<double>::infinity();
    const Triple* arg = nullptr;
    for (const auto& y : b.points) {
      const double s = 1.0 - std::norm(inner(x, y));
      if (s < best) {
        best = s;
        arg = &y;
      }
    }
    worst = std::max(worst, fs_dist(x, *arg));
  }
  return worst;
}

inline double hausdorff(const CloudCP2& a, const CloudCP2& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyCloud, "hausdorff", "cloud has no points");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// ---------------------------------------------------------------------------
// Sampling

/// Points of C^2 with labels, before embedding.
struct DomainSample {
  std::vector<Point> points;
  std::vector<Label> labels;
  std::uint64_t seed = 0;

  std::size_t interior_count() const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Interior)); }
};

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

/// Box [c - R, c + R] on each real axis around `center`.
struct SampleRegion {
  Point center{};
  double half_width = 1.0;
};

/// Shifted Halton interior points, then boundary points by bisection along
/// seeded random rays from interior points to exterior probes.
inline DomainSample sample_domain_points(const std::function<bool(const Point&)>& inside, const SampleRegion& region,
                                         int n_interior, int n_boundary, std::uint64_t seed) {
  DomainSample out;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::array<double, 4> shift = {unit(rng), unit(rng), unit(rng), unit(rng)};
  static constexpr std::array<std::uint64_t, 4> kBases = {2, 3, 5, 7};
  const double R = region.half_width;
  auto coord = [&](std::uint64_t i, std::size_t axis) {
    double u = radical_inverse(i, kBases[axis]) + shift[axis];
    if (u >= 1.0) u -= 1.0;
    return -R + 2.0 * R * u;
  };
  const std::uint64_t max_probes = std::max<std::uint64_t>(100000, 1000ULL * static_cast<std::uint64_t>(n_interior));
  std::vector<Point> interior;
  for (std::uint64_t i = 1; i <= max_probes && static_cast<int>(interior.size()) < n_interior; ++i) {
    const Point p = region.center + Point{cd(coord(i, 0), coord(i, 1)), cd(coord(i, 2), coord(i, 3))};
    if (inside(p)) interior.push_back(p);
  }
  if (interior.empty()) throw Error(ErrorKind::NoInteriorFound, "sample_domain", "predicate is false on every probe");
  out.points = interior;
  out.labels.assign(interior.size(), Label::Interior);

  std::normal_distribution<double> gauss(0.0, 1.0);
  const int max_rays = 20 * std::max(1, n_boundary);
  int found = 0;
  for (int ray = 0; ray < max_rays && found < n_boundary; ++ray) {
    const Point start = interior[static_cast<std::size_t>(ray) % interior.size()];
    Point dir{cd(gauss(rng), gauss(rng)), cd(gauss(rng), gauss(rng))};
    dir = (1.0 / norm(dir)) * dir;
    // March out until an exterior probe is found inside twice the box.
    double t_in = 0.0, t_out = -1.0;
    for (double t = 1e-3 * R; t <= 4.0 * R; t *= 2.0) {
      if (!inside(start + t * dir)) {
        t_out = t;
        break;
      }
      t_in = t;
    }
    if (t_out < 0.0) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (t_in + t_out);
      if (inside(start + mid * dir))
        t_in = mid;
      else
        t_out = mid;
    }
    out.points.push_back(start + t_in * dir);
    out.labels.push_back(Label::Boundary);
    ++found;
  }
  return out;
}

inline CloudCP2 embed_cloud(std::span<const Point> pts, std::span<const Label> labels, std::uint64_t seed,
                            const std::function<Point(const Point&)>& map = {}) {
  CloudCP2 c;
  c.seed = seed;
  c.points.reserve(pts.size());
  for (const auto& p : pts) c.points.push_back(embed(map ? map(p) : p));
  c.labels.assign(labels.begin(), labels.end());
  return c;
}

inline CloudCP2 sample_domain(const std::function<bool(const Point&)>& inside, const SampleRegion& region, int n,
                              std::uint64_t seed, int n_boundary = 0) {
  const auto s = sample_domain_points(inside, region, n, n_boundary, seed);
  return embed_cloud(s.points, s.labels, seed);
}

// ---------------------------------------------------------------------------
// Limit tracking

enum class LimitVerdict { Cauchy, Divergent, Inconclusive };

constexpr std::string_view to_string(LimitVerdict v) {
  switch (v) {
    case LimitVerdict::Cauchy: return "Cauchy";
    case LimitVerdict::Divergent: return "Divergent";
    case LimitVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct LimitEstimate {
  std::vector<int> js;
  std::vector<double> step_distance;    // to the previous cloud; NaN at the first j
  std::vector<double> target_distance;  // to the target cloud, empty without a target
  LimitVerdict verdict = LimitVerdict::Inconclusive;
  double interior_fraction = 0.0;       // at the last j
};

/// Cauchy when the tail of the series ends below the threshold and decays;
/// Divergent when the tail increases.
inline LimitVerdict series_verdict(std::span<const double> d, const Tolerances& tol) {
  std::vector<double> tail;
  for (double x : d)
    if (!std::isnan(x)) tail.push_back(x);
  if (tail.size() < 3) return LimitVerdict::Inconclusive;
  const std::size_t half = std::max<std::size_t>(3, tail.size() / 2);
  tail.erase(tail.begin(), tail.end() - static_cast<std::ptrdiff_t>(std::min(half, tail.size())));
  const double last = tail.back();
  constexpr double kZero = 1e-12;
  const bool increasing = std::adjacent_find(tail.begin(), tail.end(), std::greater_equal<>()) == tail.end();
  if (increasing && last > kZero) return LimitVerdict::Divergent;
  if (last < tol.hausdorff) {
    if (std::all_of(tail.begin(), tail.end(), [](double x) { return x < kZero; })) return LimitVerdict::Cauchy;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < tail.size(); ++k) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(std::max(tail[k], kZero)));
    }
    if (fit_line(xs, ys).slope < 0.0) return LimitVerdict::Cauchy;
  }
  return LimitVerdict::Inconclusive;
}

/// Share of interior-labelled points whose nearest boundary-labelled point
/// is farther than twice the sampling resolution (median nearest-neighbour
/// distance).
inline double interior_fraction(const CloudCP2& c) {
  std::vector<double> nn(c.size(), std::numeric_limits<double>::infinity());
  std::vector<double> to_boundary(c.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (i == k) continue;
      const double s = 1.0 - std::norm(inner(c.points[i], c.points[k]));
      nn[i] = std::min(nn[i], s);
      if (c.labels[k] == Label::Boundary) to_boundary[i] = std::min(to_boundary[i], s);
    }
  if (c.size() < 2) return 0.0;
  auto to_angle = [](double s) { return std::asin(std::sqrt(std::clamp(s, 0.0, 1.0))); };
  std::vector<double> nd;
  for (double s : nn) nd.push_back(to_angle(s));
  const double res = median(nd);
  std::size_t interior = 0, deep = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.labels[i] != Label::Interior) continue;
    ++interior;
    if (to_angle(to_boundary[i]) > 2.0 * res) ++deep;
  }
  return interior ? static_cast<double>(deep) / static_cast<double>(interior) : 0.0;
}

/// Pushes one base sample through each scaling step and measures the
/// Hausdorff distance between consecutive image clouds, and to the image
/// under `target` when one is given.
inline LimitEstimate track_limit(std::span<const ScalingStep> steps, const DomainSample& base,
                                 const std::function<Point(const Point&)>& target = {}, const Tolerances& tol = {}) {
  LimitEstimate est;
  std::optional<CloudCP2> target_cloud;
  if (target) target_cloud = embed_cloud(base.points, base.labels, base.seed, target);
  std::optional<CloudCP2> prev;
  for (const auto& s : steps) {
    auto cloud = embed_cloud(base.points, base.labels, base.seed, [&s](const Point& p) { return s(p); });
    est.js.push_back(s.j);
    est.step_distance.push_back(prev ? hausdorff(*prev, cloud) : std::numeric_limits<double>::quiet_NaN());
    if (target_cloud) est.target_distance.push_back(hausdorff(cloud, *target_cloud));
    prev = std::move(cloud);
  }
  est.verdict = series_verdict(target_cloud ? std::span<const double>(est.target_distance)
                                            : std::span<const double>(est.step_distance),
                               tol);
  if (prev) est.interior_fraction = interior_fraction(*prev);
  return est;
}

// ---------------------------------------------------------------------------
// Text format: one point per line, "re0 im0 re1 im1 re2 im2 label".

inline void write_cloud(std::ostream& os, const CloudCP2& c) {
  os.precision(17);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& t = c.points[i];
    os << t[0].real() << ' ' << t[0].imag() << ' ' << t[1].real() << ' ' << t[1].imag() << ' ' << t[2].real() << ' '
       << t[2].imag() << ' ' << to_string(c.labels[i]) << '\n';
  }
}

inline CloudCP2 read_cloud(std::istream& is) {
  CloudCP2 c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::array<double, 6> v{};
    std::string label;
    for (auto& x : v) ls >> x;
    ls >> label;
    if (!ls) throw Error(ErrorKind::EvaluationError, "read_cloud", "malformed line '" + line + "'");
    c.points.push_back({cd(v[0], v[1]), cd(v[2], v[3]), cd(v[4], v[5])});
    c.labels.push_back(label == "boundary" ? Label::Boundary : Label::Interior);
  }
  return c;
}

}  // namespace holoscale
