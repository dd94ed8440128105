// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "holoscale/error.hpp"
#include "holoscale/linalg.hpp"

namespace holoscale {

/// Uniform tensor grid over the four real axes (Re z, Im z, Re w, Im w),
/// `n` nodes per axis on [c - r, c + r], clipped to the closed polydisc
/// |z - c_z| <= r, |w - c_w| <= r.
struct TensorGrid {
  Point center{};
  double radius = 0.5;
  int n = 21;

  double spacing() const { return n > 1 ? 2.0 * radius / (n - 1) : 0.0; }

  double coord(int k) const { return -radius + k * spacing(); }

  struct Node {
    std::array<int, 4> index;
    Point p;
  };

  std::vector<Node> nodes() const {
    std::vector<Node> out;
    const double r2 = radius * radius * (1.0 + 1e-12);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const cd dz(coord(a), coord(b));
        if (std::norm(dz) > r2) continue;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            const cd dw(coord(c), coord(d));
            if (std::norm(dw) > r2) continue;
            out.push_back({{a, b, c, d}, {center.z + dz, center.w + dw}});
          }
      }
    return out;
  }
};

/// Compact sample set around a base point: the product of two square disc
/// lattices (n x n, clipped to radius r) plus seeded jitter points in every
/// product cell. Sup estimates over it approximate the true sup from below.
struct CompactGrid {
  Point center{};
  double radius = 0.5;
  int n = 7;
  int jitter_per_cell = 10;
  std::uint64_t seed = 1;

  std::vector<Point> points() const {
    std::vector<cd> lattice;
    const double h = n > 1 ? 2.0 * radius / (n - 1) : 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const cd d(-radius + a * h, -radius + b * h);
        if (std::abs(d) <= radius * (1.0 + 1e-12)) lattice.push_back(d);
      }
    if (n == 1) lattice = {cd{}};
    std::vector<Point> out;
    out.reserve(lattice.size() * lattice.size());
    for (const auto& dz : lattice)
      for (const auto& dw : lattice) out.push_back({center.z + dz, center.w + dw});

    if (n > 1 && jitter_per_cell > 0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const int cells = n - 1;
      for (int c0 = 0; c0 < cells; ++c0)
        for (int c1 = 0; c1 < cells; ++c1)
          for (int c2 = 0; c2 < cells; ++c2)
            for (int c3 = 0; c3 < cells; ++c3)
              for (int k = 0; k < jitter_per_cell; ++k) {
                const cd dz(-radius + (c0 + unit(rng)) * h, -radius + (c1 + unit(rng)) * h);
                const cd dw(-radius + (c2 + unit(rng)) * h, -radius + (c3 + unit(rng)) * h);
                if (std::abs(dz) <= radius && std::abs(dw) <= radius)
                  out.push_back({center.z + dz, center.w + dw});
              }
    }
    return out;
  }
};

}  // namespace holoscale
