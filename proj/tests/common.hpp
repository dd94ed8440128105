// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "holoscale/holoscale.hpp"

namespace testing_support {

using holoscale::cd;
using holoscale::Point;
using holoscale::dsl::MapFamily;

/// Family (f, g) with the default schedule alpha_j = 1 - 2^-j.
inline MapFamily family(const std::string& f, const std::string& g, const std::string& alpha = "1 - 2^(-j)",
                        cd limit = 1.0) {
  MapFamily fam;
  fam.f = holoscale::dsl::parse_expr(f);
  fam.g = holoscale::dsl::parse_expr(g);
  fam.schedule.closed_form = holoscale::dsl::parse_expr(alpha);
  fam.param_limit = limit;
  return fam;
}

/// Same maps with a constant parameter.
inline MapFamily frozen(const std::string& f, const std::string& g, double a) {
  MapFamily fam;
  fam.f = holoscale::dsl::parse_expr(f);
  fam.g = holoscale::dsl::parse_expr(g);
  fam.schedule.values.assign(64, cd(a, 0.0));
  return fam;
}

inline MapFamily identity_family() { return family("z", "w"); }
inline MapFamily bidisc_family() { return family("z", "(w - a)/(1 - conj(a)*w)"); }
inline MapFamily ball_family() {
  return family("(z - a)/(1 - conj(a)*z)", "sqrt(1 - abs(a)^2)*w/(1 - conj(a)*z)");
}
inline MapFamily quartic_family() { return family("(1 - a)^(1/4)*z", "(1 - a)*w"); }
inline MapFamily cex1_family() {
  return family(
      "((z - w^2) - a)/(1 - conj(a)*(z - w^2)) + w^2*sqrt((1 - abs(a)^2)/(1 - conj(a)*(z - w^2))^2)",
      "w*((1 - abs(a)^2)/(1 - conj(a)*(z - w^2))^2)^(1/4)");
}
inline MapFamily cex2_family() { return family("z", "z^2 + ((w - z^2) - a)/(1 - conj(a)*(w - z^2))"); }

inline holoscale::dsl::DefiningFunction defining(const std::string& rho, double radius = 1.0) {
  holoscale::dsl::DefiningFunction df;
  df.expr = holoscale::dsl::parse_expr(rho);
  df.validity_radius = radius;
  df.normalized = true;
  return df;
}

}  // namespace testing_support
