// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "holoscale/boundary_type.hpp"
#include "holoscale/dsl/config.hpp"
#include "holoscale/grid.hpp"
#include "holoscale/holo_diff.hpp"
#include "holoscale/projective_limit.hpp"
#include "holoscale/scaling.hpp"

namespace holoscale {

inline constexpr const char* kVersion = "0.3.1";

using json = nlohmann::ordered_json;

enum class ModeChoice { Auto, Frankel, Variety };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> jmax;
  ModeChoice mode = ModeChoice::Auto;
  bool quiet = false;
  bool write_files = true;
};

struct RunResult {
  int exit_code = 0;
  json report;
  json timings;
};

namespace detail {

inline json complex_json(cd v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

/// JSON has no infinities or NaN; they are written as strings.
inline json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json disc_json(const Disc& d) {
  json a = json::array(), b = json::array();
  for (const cd& c : d.a) a.push_back(complex_json(c));
  for (const cd& c : d.b) b.push_back(complex_json(c));
  return json{{"first", a}, {"second", b}};
}

inline json error_json(const Error& e) {
  json j{{"kind", std::string(to_string(e.kind()))}, {"operation", e.operation()}, {"detail", e.detail()}};
  if (const auto* se = dynamic_cast<const SyntaxError*>(&e)) {
    j["line"] = se->line();
    j["col"] = se->col();
  }
  return j;
}

class StageClock {
 public:
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const json& timings() const { return timings_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  json timings_ = json::object();
};

/// The inequality closest to vanishing at p, i.e. the active boundary piece.
inline const dsl::Expr& active_inequality(const dsl::DomainSpec& d, const Point& p) {
  const dsl::Expr* best = nullptr;
  double best_v = std::numeric_limits<double>::infinity();
  for (const auto& r : d.inequalities) {
    double v;
    try {
      v = std::abs(detail::eval_removable(real_part_of(r), p));
    } catch (const Error&) {
      continue;
    }
    if (v < best_v) {
      best_v = v;
      best = &r;
    }
  }
  if (!best) throw Error(ErrorKind::PreconditionFailed, "normal_form", "no inequality can be evaluated at p");
  return *best;
}

inline std::optional<NormalForm> boundary_normal_form(const dsl::ExperimentConfig& cfg) {
  const auto& d = cfg.domain;
  if (d.inequalities.empty() && d.rho) {
    if (d.boundary_point && !(*d.boundary_point == Point{}))
      throw Error(ErrorKind::ConfigError, "run", "a domain given by rho has its boundary point at the origin");
    return NormalForm::from_defining(*d.rho);
  }
  if (!d.boundary_point) return std::nullopt;
  return normal_form(active_inequality(d, *d.boundary_point), *d.boundary_point, d.radius);
}

}  // namespace detail

/// Runs diagnose -> scale -> type -> limit on a parsed configuration. Module
/// errors stop the pipeline and land in the report's error field.
inline RunResult run_pipeline(dsl::ExperimentConfig cfg, const RunOptions& opt) {
  using detail::complex_json;
  using detail::real_json;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.jmax) {
    cfg.jmax = *opt.jmax;
    dsl::validate(cfg);
  }
  const auto& tol = cfg.tol;
  RunResult res;
  json& rep = res.report;
  rep["tool"] = "holoscale";
  rep["version"] = kVersion;
  rep["seed"] = cfg.seed;
  rep["config"] = json{{"name", cfg.name}, {"cdl", dsl::to_cdl(cfg)}};
  rep["per_j"] = json::array();
  rep["verdicts"] = json::object();
  rep["error"] = nullptr;
  json& verdicts = rep["verdicts"];
  detail::StageClock clock;

  std::vector<std::vector<std::string>> csv_rows;
  std::optional<CloudCP2> last_cloud;
  try {
    std::optional<Case> case_kind;
    if (cfg.family) {
      const auto& fam = *cfg.family;
      const auto grid = CompactGrid{cfg.q, cfg.grid_radius, cfg.grid, 10, 1}.points();
      // Per-j diagnostics at q.
      for (int j = cfg.jmin; j <= cfg.jmax; ++j) {
        const auto jq = jacobian(fam, j, cfg.q);
        const auto e = eigenpair(jq.m, tol.eig_degenerate);
        rep["per_j"].push_back(json{{"j", j},
                                    {"alpha", complex_json(fam.alpha(j))},
                                    {"lambda1", complex_json(e.lambda1)},
                                    {"lambda2", complex_json(e.lambda2)},
                                    {"degenerate", e.degenerate},
                                    {"op_norm", jq.m.det() == cd{} ? 0.0 : op_norm(jq.m)}});
      }
      clock.mark("eigen");
      const auto cr = classify_case(fam, cfg.q, cfg.jmin, cfg.jmax, tol);
      case_kind = cr.kind;
      verdicts["case"] = to_string(cr.kind);
      verdicts["trend"] = json{{"lambda1", to_string(cr.trend1)}, {"lambda2", to_string(cr.trend2)}};

      std::vector<double> m;
      for (int j = cfg.jmin; j <= cfg.jmax; ++j) {
        m.push_back(norm_sup(fam, cfg.q, j, grid, tol));
        rep["per_j"][static_cast<std::size_t>(j - cfg.jmin)]["norm_sup"] = m.back();
      }
      const auto normality = normality_diagnostic(m, tol);
      verdicts["normality"] = to_string(normality);
      clock.mark("norm_sup");

      const auto dr = det_ratio_bounds(fam, cfg.q, grid, cfg.jmin, cfg.jmax, tol);
      for (std::size_t k = 0; k < dr.min_per_j.size(); ++k) {
        rep["per_j"][k]["det_ratio_min"] = dr.min_per_j[k];
        rep["per_j"][k]["det_ratio_max"] = dr.max_per_j[k];
      }
      verdicts["det_ratio"] = json{{"min", dr.min}, {"max", dr.max}, {"violation_suspected", dr.violation_suspected}};
      clock.mark("det_ratio");

      ScalingMode mode = ScalingMode::Frankel;
      if (opt.mode == ModeChoice::Variety ||
          (opt.mode == ModeChoice::Auto && cr.kind == Case::AccumulationVariety && normality != Normality::Bounded))
        mode = ScalingMode::VarietyEigen;
      verdicts["scaling_mode"] = to_string(mode);
      std::vector<ScalingStep> steps;
      for (int j = cfg.jmin; j <= cfg.jmax; ++j)
        steps.push_back(mode == ScalingMode::Frankel ? frankel_scale(fam, cfg.q, j, tol) : variety_scale(fam, cfg.q, j, tol));
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const Point a = steps[k](cfg.q);
        rep["per_j"][k]["anchor_image_norm"] = norm(a);
        rep["per_j"][k]["normalizer"] =
            json::array({complex_json(steps[k].normalizer.a11), complex_json(steps[k].normalizer.a12),
                         complex_json(steps[k].normalizer.a21), complex_json(steps[k].normalizer.a22)});
      }
      clock.mark("scaling");

      const auto base = sample_domain_points([&cfg](const Point& p) { return cfg.domain.contains(p); },
                                             SampleRegion{cfg.q, cfg.region}, cfg.samples, cfg.boundary_samples,
                                             cfg.seed);
      std::function<Point(const Point&)> target;
      if (cfg.target) target = [t = *cfg.target](const Point& p) { return t.apply(p); };
      const auto lim = track_limit(steps, base, target, tol);
      for (std::size_t k = 0; k < lim.js.size(); ++k) {
        rep["per_j"][k]["hausdorff_step"] = real_json(lim.step_distance[k]);
        if (!lim.target_distance.empty()) rep["per_j"][k]["hausdorff_target"] = lim.target_distance[k];
      }
      verdicts["limit"] = json{{"verdict", to_string(lim.verdict)},
                               {"against", cfg.target ? "target" : "previous"},
                               {"interior_fraction", lim.interior_fraction},
                               {"interior_samples", base.interior_count()},
                               {"boundary_samples", base.points.size() - base.interior_count()}};
      last_cloud = embed_cloud(base.points, base.labels, base.seed, [&](const Point& p) { return steps.back()(p); });
      clock.mark("limit");
    }

    if (auto nf = detail::boundary_normal_form(cfg)) {
      const auto tr = classify_type(*nf, DiscSearch{}, TypeIParams{}, tol);
      json t{{"kind", to_string(tr.kind)},
             {"t_estimate", real_json(tr.t_estimate)},
             {"witness", detail::disc_json(tr.witness)},
             {"exhausted", tr.exhausted},
             {"discs_tested", tr.discs_tested}};
      json mz = json::array();
      for (const auto& [r, v] : tr.m_z_samples) mz.push_back(json{{"abs_z", r}, {"m_z", v}});
      t["m_z"] = mz;
      verdicts["type"] = t;
      clock.mark("type");
      if (cfg.family && case_kind == Case::AccumulationPoint && tr.kind == TypeKind::Finite) {
        const auto fit = limit_boundary_fit(*cfg.family, cfg.q, *nf, static_cast<int>(tr.t_estimate), cfg.jmin,
                                            cfg.jmax, tol);
        verdicts["limit_fit"] = json{{"k", fit.k},       {"h", complex_json(fit.h)},
                                     {"c", complex_json(fit.c)}, {"d", complex_json(fit.d)},
                                     {"offset", fit.offset}, {"beta", fit.beta},
                                     {"swapped", fit.swapped}, {"residual", fit.residual}};
        clock.mark("limit_fit");
      }
    }
  } catch (const Error& e) {
    rep["error"] = detail::error_json(e);
    res.exit_code = is_config_error(e.kind()) ? 2 : 3;
  }
  res.timings = clock.timings();

  if (opt.write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir / "series");
    std::ofstream(opt.out_dir / "report.json") << rep.dump(2) << '\n';
    std::ofstream(opt.out_dir / "timings.json") << res.timings.dump(2) << '\n';
    if (!rep["per_j"].empty()) {
      std::ofstream csv(opt.out_dir / "series" / "diagnostics.csv");
      csv.precision(17);
      csv << "j,lambda1_re,lambda1_im,lambda2_re,lambda2_im,op_norm,norm_sup,det_ratio_min,det_ratio_max,"
             "hausdorff_step,hausdorff_target\n";
      auto num = [](const json& rec, const char* key) -> std::string {
        if (!rec.contains(key) || !rec[key].is_number()) return "";
        std::ostringstream os;
        os.precision(17);
        os << rec[key].get<double>();
        return os.str();
      };
      for (const auto& r : rep["per_j"]) {
        csv << r["j"].get<int>() << ',' << num(r["lambda1"], "re") << ',' << num(r["lambda1"], "im") << ','
            << num(r["lambda2"], "re") << ',' << num(r["lambda2"], "im") << ',' << num(r, "op_norm") << ','
            << num(r, "norm_sup") << ',' << num(r, "det_ratio_min") << ',' << num(r, "det_ratio_max") << ','
            << num(r, "hausdorff_step") << ',' << num(r, "hausdorff_target") << '\n';
      }
    }
    if (last_cloud) {
      std::ofstream cloud(opt.out_dir / "series" / "cloud_last.txt");
      write_cloud(cloud, *last_cloud);
    }
  }
  if (!opt.quiet) {
    std::cerr << cfg.name << ": ";
    for (const auto& [k, v] : verdicts.items()) {
      if (v.is_string()) std::cerr << k << '=' << v.get<std::string>() << ' ';
      else if (v.is_object() && v.contains("verdict")) std::cerr << k << '=' << v["verdict"].get<std::string>() << ' ';
      else if (v.is_object() && v.contains("kind")) std::cerr << k << '=' << v["kind"].get<std::string>() << ' ';
    }
    if (!rep["error"].is_null()) std::cerr << "error=" << rep["error"]["kind"].get<std::string>();
    std::cerr << '\n';
  }
  return res;
}

/// Loads and runs a `.cdl` file; configuration errors give exit code 2.
inline RunResult run(const std::string& config_path, const RunOptions& opt) {
  dsl::ExperimentConfig cfg;
  try {
    cfg = dsl::load_config(config_path);
  } catch (const Error& e) {
    RunResult res;
    res.exit_code = is_config_error(e.kind()) ? 2 : 3;
    res.report = json{{"tool", "holoscale"}, {"version", kVersion}, {"error", detail::error_json(e)}};
    if (!opt.quiet) std::cerr << e.what() << '\n';
    return res;
  }
  return run_pipeline(std::move(cfg), opt);
}

// ---------------------------------------------------------------------------
// Golden comparison

struct FieldTolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

/// Fields that depend on the sampling seed.
inline bool seed_dependent(const std::string& path) {
  for (const char* key : {"hausdorff_step", "hausdorff_target", "interior_fraction", "config", "seed"})
    if (path.find(key) != std::string::npos) return true;
  return false;
}

inline FieldTolerance tolerance_for(const std::string& path) {
  if (seed_dependent(path)) return {1e-6, 1e-9};
  if (path.find("residual") != std::string::npos) return {1e-6, 1e-9};
  return {};
}

/// Appends one message per mismatch between `golden` and `actual`.
inline void compare_json(const json& golden, const json& actual, const std::string& path, bool skip_seed_fields,
                         std::vector<std::string>& out) {
  if (skip_seed_fields && seed_dependent(path)) return;
  auto where = [&] { return path.empty() ? std::string("<root>") : path; };
  if (golden.is_number() && actual.is_number()) {
    const double g = golden.get<double>(), a = actual.get<double>();
    const auto t = tolerance_for(path);
    if (!(std::abs(g - a) <= t.abs + t.rel * std::abs(g)))
      out.push_back(where() + ": golden " + golden.dump() + ", got " + actual.dump());
    return;
  }
  if (golden.type() != actual.type()) {
    out.push_back(where() + ": golden " + golden.dump() + ", got " + actual.dump());
    return;
  }
  if (golden.is_object()) {
    for (const auto& [k, v] : golden.items()) {
      const std::string sub = path.empty() ? k : path + "." + k;
      if (!actual.contains(k)) {
        if (!(skip_seed_fields && seed_dependent(sub))) out.push_back(sub + ": missing");
        continue;
      }
      compare_json(v, actual[k], sub, skip_seed_fields, out);
    }
    for (const auto& [k, v] : actual.items())
      if (!golden.contains(k)) out.push_back((path.empty() ? k : path + "." + k) + ": not in golden");
    return;
  }
  if (golden.is_array()) {
    if (golden.size() != actual.size()) {
      out.push_back(where() + ": length " + std::to_string(golden.size()) + " vs " + std::to_string(actual.size()));
      return;
    }
    for (std::size_t i = 0; i < golden.size(); ++i)
      compare_json(golden[i], actual[i], path + "[" + std::to_string(i) + "]", skip_seed_fields, out);
    return;
  }
  if (golden != actual) out.push_back(where() + ": golden " + golden.dump() + ", got " + actual.dump());
}

struct VerifyOptions {
  std::filesystem::path out_dir = "verify_out";
  std::optional<std::uint64_t> seed;
  bool bless = false;
  bool quiet = true;
};

struct VerifyResult {
  int exit_code = 0;
  int passed = 0;
  int failed = 0;
  std::vector<std::string> messages;
};

/// Re-runs every `*.cdl` in the corpus and diffs against `golden/<name>.json`.
inline VerifyResult verify(const std::filesystem::path& corpus, const VerifyOptions& opt, std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  VerifyResult vr;
  std::vector<fs::path> configs;
  if (fs::is_directory(corpus))
    for (const auto& entry : fs::directory_iterator(corpus))
      if (entry.path().extension() == ".cdl") configs.push_back(entry.path());
  if (configs.empty()) {
    const Error e(ErrorKind::CorpusMissing, "verify", "no .cdl files in '" + corpus.string() + "'");
    log << e.what() << '\n';
    vr.exit_code = 2;
    vr.messages.push_back(e.what());
    return vr;
  }
  std::sort(configs.begin(), configs.end());
  const fs::path golden_dir = corpus / "golden";
  for (const auto& path : configs) {
    const std::string name = path.stem().string();
    RunOptions ro;
    ro.out_dir = opt.out_dir / name;
    ro.seed = opt.seed;
    ro.quiet = opt.quiet;
    const auto res = run(path.string(), ro);
    const fs::path gpath = golden_dir / (name + ".json");
    if (opt.bless) {
      fs::create_directories(golden_dir);
      std::ofstream(gpath) << res.report.dump(2) << '\n';
      log << "BLESS " << name << '\n';
      ++vr.passed;
      continue;
    }
    std::vector<std::string> diffs;
    std::ifstream in(gpath);
    if (!in) {
      diffs.push_back("golden file missing");
    } else {
      json golden;
      try {
        golden = json::parse(in);
      } catch (const std::exception& ex) {
        diffs.push_back(std::string("golden file unreadable: ") + ex.what());
      }
      if (diffs.empty()) compare_json(golden, res.report, "", opt.seed.has_value(), diffs);
    }
    if (diffs.empty()) {
      ++vr.passed;
      log << "PASS " << name << '\n';
    } else {
      ++vr.failed;
      log << "FAIL " << name << '\n';
      for (const auto& d : diffs) {
        log << "  " << d << '\n';
        vr.messages.push_back(name + ": " + d);
      }
    }
  }
  log << vr.passed << " passed, " << vr.failed << " failed\n";
  vr.exit_code = vr.failed ? 1 : 0;
  return vr;
}

}  // namespace holoscale
