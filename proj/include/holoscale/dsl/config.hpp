// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "holoscale/dsl/parser.hpp"

namespace holoscale::dsl {

/// Local defining function: the domain is `Im w > rho(z, zb, Re w)` near
/// the origin. The expression is evaluated with w bound to the real value u.
struct DefiningFunction {
  Expr expr;
  double validity_radius = 1.0;
  bool normalized = false;

  double operator()(cd z, double u) const {
    return expr(Bindings{}.set(Var::Z, z).set(Var::W, cd(u, 0.0))).real();
  }

  /// log rho, evaluated in log space where the expression allows it.
  double log_value(cd z, double u) const {
    return expr.log_abs(Bindings{}.set(Var::Z, z).set(Var::W, cd(u, 0.0)));
  }

  /// rho at the origin, reading removable singularities (e.g. exp(-1/|z|^2))
  /// as their limit along a small ring.
  double value_at_origin() const {
    try {
      return (*this)(0.0, 0.0);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivisionByZero && e.kind() != ErrorKind::BranchCutViolation) throw;
    }
    constexpr double r = 1e-6;
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) acc += (*this)(std::polar(r, 0.5 + k * 1.5707963267948966), 0.0);
    return acc / 4.0;
  }
};

/// Maps j to the family parameter alpha_j.
struct Schedule {
  std::optional<Expr> closed_form;  // expression in j
  std::vector<cd> values;           // explicit list, values[0] is alpha_1

  cd operator()(int j) const {
    if (closed_form) return (*closed_form)(Bindings{}.set(Var::J, cd(static_cast<double>(j), 0.0)));
    if (j < 1 || static_cast<std::size_t>(j) > values.size())
      throw Error(ErrorKind::ConfigError, "schedule",
                  "index j=" + std::to_string(j) + " outside the explicit alpha list");
    return values[static_cast<std::size_t>(j - 1)];
  }
};

/// One-parameter family of holomorphic maps phi_j = (f, g) with a = alpha_j.
struct MapFamily {
  Expr f;
  Expr g;
  Schedule schedule;
  cd param_limit{};

  cd alpha(int j) const { return schedule(j); }

  Bindings bindings(int j, const Point& p) const {
    return Bindings{}
        .set(Var::Z, p.z)
        .set(Var::W, p.w)
        .set(Var::A, alpha(j))
        .set(Var::J, cd(static_cast<double>(j), 0.0));
  }

  Point apply(int j, const Point& p) const {
    const auto b = bindings(j, p);
    return {f(b), g(b)};
  }
};

/// A map (f, g) without parameter, e.g. the closed-form limit of a scaled
/// sequence used as a comparison target.
struct TargetMap {
  Expr f;
  Expr g;
  Point apply(const Point& p) const {
    const auto b = Bindings{}.set(Var::Z, p.z).set(Var::W, p.w);
    return {f(b), g(b)};
  }
};

/// Domain description. Membership is the intersection of `ineq < 0`
/// constraints; when none are given the local form `Im w > rho` is used.
struct DomainSpec {
  std::vector<Expr> inequalities;
  std::optional<DefiningFunction> rho;
  double radius = 1.0;
  std::optional<Point> boundary_point;

  bool contains(const Point& p) const {
    try {
      if (!inequalities.empty()) {
        const auto b = Bindings{}.set(Var::Z, p.z).set(Var::W, p.w);
        for (const auto& r : inequalities)
          if (!(r(b).real() < 0.0)) return false;
        return true;
      }
      if (rho) return p.w.imag() > (*rho)(p.z, p.w.real());
    } catch (const Error&) {
      return false;
    }
    return true;
  }
};

/// Named thresholds; every one can be overridden with `tol.<name> = value`.
struct Tolerances {
  double zero = 1e-3;            // |lambda| below this at j_max counts as small
  double zero_trend = 0.1;       // minimal log-decay per step for "-> 0"
  double eig_degenerate = 1e-9;  // discriminant modulus of the E-locus
  double eigvec_indep = 1e-6;    // |det| of the eigenvector matrix
  double det_degenerate = 1e-14;
  double norm_flat = 0.25;       // relative band around the running median
  double norm_growth = 0.2;      // log M_j slope per step for Unbounded
  double hausdorff = 0.05;
  double mz = 0.25;
  double collapse = 1e-12;
  double ratio_cauchy = 1e-2;

  static const std::vector<std::pair<std::string_view, double Tolerances::*>>& fields() {
    static const std::vector<std::pair<std::string_view, double Tolerances::*>> f = {
        {"zero", &Tolerances::zero},
        {"zero_trend", &Tolerances::zero_trend},
        {"eig_degenerate", &Tolerances::eig_degenerate},
        {"eigvec_indep", &Tolerances::eigvec_indep},
        {"det_degenerate", &Tolerances::det_degenerate},
        {"norm_flat", &Tolerances::norm_flat},
        {"norm_growth", &Tolerances::norm_growth},
        {"hausdorff", &Tolerances::hausdorff},
        {"mz", &Tolerances::mz},
        {"collapse", &Tolerances::collapse},
        {"ratio_cauchy", &Tolerances::ratio_cauchy},
    };
    return f;
  }
};

struct ExperimentConfig {
  std::string name;
  DomainSpec domain;
  std::optional<MapFamily> family;
  std::optional<TargetMap> target;
  Point q{};
  int jmin = 1;
  int jmax = 12;
  int grid = 7;
  double grid_radius = 0.5;
  int samples = 2000;
  int boundary_samples = 500;
  double region = 4.0;
  std::uint64_t seed = 1;
  Tolerances tol;
  std::map<std::string, bool> explicit_tol;  // which tol.* keys were written
};

namespace detail {

inline std::string format_complex(cd v) {
  const double re = v.real(), im = v.imag();
  if (im == 0.0) return format_double(re);
  if (re == 0.0) return (im == 1.0 ? std::string("i") : format_double(im) + "i");
  return format_double(re) + (im < 0.0 ? " - " : " + ") + format_double(std::abs(im)) + "i";
}

class ConfigParser {
 public:
  explicit ConfigParser(std::string_view src) : toks_(tokenize(src)), ep_(toks_) {}

  ExperimentConfig parse() {
    ExperimentConfig cfg;
    while (peek().kind != Tok::End) {
      const Token sec = expect_ident("section name (domain, family, experiment, target)");
      ep_.expect('{');
      if (sec.text == "domain")
        domain(cfg);
      else if (sec.text == "family")
        family(cfg);
      else if (sec.text == "experiment")
        experiment(cfg);
      else if (sec.text == "target")
        target(cfg);
      else
        throw SyntaxError(sec.line, sec.col, "section name (domain, family, experiment, target)", sec.describe());
      ep_.expect('}');
    }
    return cfg;
  }

 private:
  const Token& peek() const { return ep_.peek(); }

  Token expect_ident(const std::string& what) {
    const Token t = peek();
    if (t.kind != Tok::Ident) throw SyntaxError(t.line, t.col, what, t.describe());
    ep_.reset(ep_.position() + 1);
    return t;
  }

  Expr value_expr() {
    ep_.expect('=');
    auto e = ep_.parse_expression();
    ep_.expect(';');
    return e;
  }

  double real_value(const Token& key) {
    const cd v = eval_constant(value_expr());
    if (v.imag() != 0.0)
      throw Error(ErrorKind::ConfigError, "parse", "key '" + key.text + "' expects a real value");
    return v.real();
  }

  int int_value(const Token& key) {
    const double v = real_value(key);
    if (std::round(v) != v)
      throw Error(ErrorKind::ConfigError, "parse", "key '" + key.text + "' expects an integer");
    return static_cast<int>(v);
  }

  Point pair_value() {
    ep_.expect('=');
    auto [a, b] = ep_.parse_pair();
    ep_.expect(';');
    return {eval_constant(a), eval_constant(b)};
  }

  bool at_close() const { return peek().is('}'); }

  void domain(ExperimentConfig& cfg) {
    while (!at_close()) {
      const Token key = expect_ident("domain key (rho, radius, ineq, boundary)");
      if (key.text == "rho") {
        cfg.domain.rho = DefiningFunction{value_expr(), cfg.domain.radius, false};
      } else if (key.text == "radius") {
        cfg.domain.radius = real_value(key);
        if (cfg.domain.rho) cfg.domain.rho->validity_radius = cfg.domain.radius;
      } else if (key.text == "ineq") {
        cfg.domain.inequalities.push_back(value_expr());
      } else if (key.text == "boundary") {
        cfg.domain.boundary_point = pair_value();
      } else {
        throw SyntaxError(key.line, key.col, "domain key (rho, radius, ineq, boundary)", key.describe());
      }
    }
  }

  void family(ExperimentConfig& cfg) {
    MapFamily fam;
    bool have_f = false, have_g = false, have_alpha = false;
    while (!at_close()) {
      const Token key = expect_ident("family key (f, g, alpha, limit)");
      if (key.text == "f") {
        fam.f = value_expr();
        have_f = true;
      } else if (key.text == "g") {
        fam.g = value_expr();
        have_g = true;
      } else if (key.text == "alpha") {
        have_alpha = true;
        if (peek().is('(')) {
          ep_.expect('(');
          const Token var = expect_ident("'j'");
          if (var.text != "j") throw SyntaxError(var.line, var.col, "'j'", var.describe());
          ep_.expect(')');
          fam.schedule.closed_form = value_expr();
        } else {
          ep_.expect('=');
          ep_.expect('[');
          while (true) {
            fam.schedule.values.push_back(eval_constant(ep_.parse_expression()));
            if (peek().is(']')) break;
            ep_.expect(',');
          }
          ep_.expect(']');
          ep_.expect(';');
        }
      } else if (key.text == "limit") {
        fam.param_limit = eval_constant(value_expr());
      } else {
        throw SyntaxError(key.line, key.col, "family key (f, g, alpha, limit)", key.describe());
      }
    }
    if (!have_f || !have_g || !have_alpha)
      throw Error(ErrorKind::ConfigError, "parse", "family section needs f, g and alpha");
    cfg.family = std::move(fam);
  }

  void target(ExperimentConfig& cfg) {
    TargetMap t;
    while (!at_close()) {
      const Token key = expect_ident("target key (f, g)");
      if (key.text == "f")
        t.f = value_expr();
      else if (key.text == "g")
        t.g = value_expr();
      else
        throw SyntaxError(key.line, key.col, "target key (f, g)", key.describe());
    }
    if (t.f.empty() || t.g.empty()) throw Error(ErrorKind::ConfigError, "parse", "target section needs f and g");
    cfg.target = std::move(t);
  }

  void experiment(ExperimentConfig& cfg) {
    while (!at_close()) {
      const Token key = expect_ident("experiment key");
      const std::string& k = key.text;
      if (k == "q") {
        cfg.q = pair_value();
      } else if (k == "jmin") {
        cfg.jmin = int_value(key);
      } else if (k == "jmax") {
        cfg.jmax = int_value(key);
      } else if (k == "grid") {
        cfg.grid = int_value(key);
      } else if (k == "grid_radius") {
        cfg.grid_radius = real_value(key);
      } else if (k == "samples") {
        cfg.samples = int_value(key);
      } else if (k == "boundary_samples") {
        cfg.boundary_samples = int_value(key);
      } else if (k == "region") {
        cfg.region = real_value(key);
      } else if (k == "seed") {
        cfg.seed = static_cast<std::uint64_t>(int_value(key));
      } else if (k.rfind("tol.", 0) == 0) {
        const std::string name = k.substr(4);
        bool found = false;
        for (const auto& [field, member] : Tolerances::fields()) {
          if (field == name) {
            cfg.tol.*member = real_value(key);
            cfg.explicit_tol[name] = true;
            found = true;
          }
        }
        if (!found) throw SyntaxError(key.line, key.col, "known tolerance name", key.describe());
      } else {
        throw SyntaxError(key.line, key.col,
                          "experiment key (q, jmin, jmax, grid, grid_radius, samples, boundary_samples, region, "
                          "seed, tol.*)",
                          key.describe());
      }
    }
  }

  std::vector<Token> toks_;
  ExprParser ep_;
};

}  // namespace detail

/// Checks the invariants a parsed configuration must satisfy.
inline void validate(ExperimentConfig& cfg) {
  if (cfg.domain.rho) {
    auto& rho = *cfg.domain.rho;
    rho.validity_radius = cfg.domain.radius;
    // Real-valuedness on a small polar lattice of the trust region.
    for (int ir = 1; ir <= 4; ++ir) {
      for (int it = 0; it < 8; ++it) {
        for (int iu = -2; iu <= 2; ++iu) {
          const cd z = std::polar(rho.validity_radius * ir / 5.0, 0.3 + it * 0.785398);
          const double u = rho.validity_radius * iu / 5.0;
          cd v;
          try {
            v = rho.expr(Bindings{}.set(Var::Z, z).set(Var::W, cd(u, 0.0)));
          } catch (const Error&) {
            continue;
          }
          if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
            throw Error(ErrorKind::ConfigError, "parse", "rho is not real-valued at z=" + detail::format_complex(z));
        }
      }
    }
    rho.normalized = std::abs(rho.value_at_origin()) < 1e-12;
  }
  if (cfg.family) {
    const auto& fam = *cfg.family;
    if (!fam.f.holomorphic())
      throw Error(ErrorKind::NonHolomorphicMapComponent, "parse", "f = " + fam.f.to_string());
    if (!fam.g.holomorphic())
      throw Error(ErrorKind::NonHolomorphicMapComponent, "parse", "g = " + fam.g.to_string());
    if (cfg.jmin < 1 || cfg.jmax < cfg.jmin)
      throw Error(ErrorKind::ConfigError, "parse", "need 1 <= jmin <= jmax");
    double prev = INFINITY;
    for (int j = cfg.jmin; j <= cfg.jmax; ++j) {
      const double d = std::abs(fam.alpha(j) - fam.param_limit);
      if (!(d < prev))
        throw Error(ErrorKind::ConfigError, "parse",
                    "|alpha_j - limit| is not strictly decreasing at j=" + std::to_string(j));
      prev = d;
    }
  }
  if (!cfg.domain.contains(cfg.q))
    throw Error(ErrorKind::ConfigError, "parse", "base point q is not inside the domain");
}

inline ExperimentConfig parse_config(std::string_view source) {
  auto cfg = detail::ConfigParser(source).parse();
  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "load", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str());
  auto slash = path.find_last_of('/');
  auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
  if (auto dot = stem.rfind(".cdl"); dot != std::string::npos) stem.resize(dot);
  cfg.name = stem;
  return cfg;
}

/// Canonical `.cdl` text for a configuration; parsing it gives back an
/// equivalent configuration.
inline std::string to_cdl(const ExperimentConfig& cfg) {
  using detail::format_complex;
  using detail::format_double;
  std::ostringstream os;
  os << "domain {\n";
  if (cfg.domain.rho) os << "  rho = " << cfg.domain.rho->expr.to_string() << ";\n";
  os << "  radius = " << format_double(cfg.domain.radius) << ";\n";
  for (const auto& r : cfg.domain.inequalities) os << "  ineq = " << r.to_string() << ";\n";
  if (cfg.domain.boundary_point)
    os << "  boundary = (" << format_complex(cfg.domain.boundary_point->z) << ", "
       << format_complex(cfg.domain.boundary_point->w) << ");\n";
  os << "}\n";
  if (cfg.family) {
    const auto& fam = *cfg.family;
    os << "family {\n";
    os << "  f = " << fam.f.to_string() << ";\n";
    os << "  g = " << fam.g.to_string() << ";\n";
    if (fam.schedule.closed_form) {
      os << "  alpha(j) = " << fam.schedule.closed_form->to_string() << ";\n";
    } else {
      os << "  alpha = [";
      for (std::size_t k = 0; k < fam.schedule.values.size(); ++k)
        os << (k ? ", " : "") << format_complex(fam.schedule.values[k]);
      os << "];\n";
    }
    os << "  limit = " << format_complex(fam.param_limit) << ";\n";
    os << "}\n";
  }
  if (cfg.target) {
    os << "target {\n";
    os << "  f = " << cfg.target->f.to_string() << ";\n";
    os << "  g = " << cfg.target->g.to_string() << ";\n";
    os << "}\n";
  }
  os << "experiment {\n";
  os << "  q = (" << format_complex(cfg.q.z) << ", " << format_complex(cfg.q.w) << ");\n";
  os << "  jmin = " << cfg.jmin << ";\n";
  os << "  jmax = " << cfg.jmax << ";\n";
  os << "  grid = " << cfg.grid << ";\n";
  os << "  grid_radius = " << format_double(cfg.grid_radius) << ";\n";
  os << "  samples = " << cfg.samples << ";\n";
  os << "  boundary_samples = " << cfg.boundary_samples << ";\n";
  os << "  region = " << format_double(cfg.region) << ";\n";
  os << "  seed = " << cfg.seed << ";\n";
  for (const auto& [field, member] : Tolerances::fields())
    if (cfg.explicit_tol.count(std::string(field)))
      os << "  tol." << field << " = " << format_double(cfg.tol.*member) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace holoscale::dsl
