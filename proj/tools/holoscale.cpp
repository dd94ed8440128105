// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "holoscale/holoscale.hpp"

namespace {

std::string default_out(const std::string& fallback) {
  if (const char* env = std::getenv("HOLOSCALE_OUT"); env && *env) return env;
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holoscale: scaling diagnostics for automorphism families of domains in C^2"};
  app.require_subcommand(1);
  app.set_version_flag("--version", holoscale::kVersion);

  auto* run_cmd = app.add_subcommand("run", "run the pipeline on one .cdl experiment");
  std::string cfg_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int jmax = -1;
  std::string mode = "auto";
  bool quiet = false;
  run_cmd->add_option("config", cfg_path, "experiment file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default $HOLOSCALE_OUT or .)");
  run_cmd->add_option("--seed", seed, "override the sampling seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--jmax", jmax, "override the last index")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mode", mode, "scaling mode")->check(CLI::IsMember({"auto", "frankel", "variety"}));
  run_cmd->add_flag("--quiet", quiet, "no summary on stderr");

  auto* verify_cmd = app.add_subcommand("verify", "re-run a corpus and diff against its goldens");
  std::string corpus;
  std::string verify_out;
  std::int64_t verify_seed = -1;
  bool bless = false;
  verify_cmd->add_option("corpus", corpus, "corpus directory")->required();
  verify_cmd->add_option("--out", verify_out, "where to write the fresh reports");
  verify_cmd->add_option("--seed", verify_seed, "run with another seed; seed-dependent fields are skipped")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_flag("--bless", bless, "overwrite the goldens with the fresh reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    holoscale::RunOptions opt;
    opt.out_dir = out_dir.empty() ? default_out(".") : out_dir;
    if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
    if (jmax > 0) opt.jmax = jmax;
    opt.mode = mode == "frankel" ? holoscale::ModeChoice::Frankel
               : mode == "variety" ? holoscale::ModeChoice::Variety
                                   : holoscale::ModeChoice::Auto;
    opt.quiet = quiet;
    return holoscale::run(cfg_path, opt).exit_code;
  }
  holoscale::VerifyOptions vo;
  vo.out_dir = verify_out.empty() ? default_out("verify_out") : verify_out;
  if (verify_seed >= 0) vo.seed = static_cast<std::uint64_t>(verify_seed);
  vo.bless = bless;
  return holoscale::verify(corpus, vo).exit_code;
}
