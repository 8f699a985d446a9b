// drso: command-line experiment runner.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <optional>

#include "drso/harness.hpp"

namespace {

using namespace drso::harness;

struct CommonFlags {
  std::string config;
  std::string out;
  bool force = false;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> fe_max;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* opt = cmd->add_option("--config", f.config, "JSON experiment file");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides config.output_dir)");
  cmd->add_flag("--force", f.force, "recompute cells that are already complete");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--runs", f.runs, "runs per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--fe-max", f.fe_max, "evaluation budget per run")->check(CLI::PositiveNumber);
  cmd->add_flag("-q,--quiet", f.quiet, "no progress output");
}

ExperimentConfig resolve(const CommonFlags& f, ExperimentConfig cfg) {
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.fe_max) {
    cfg.algo["fe_max"] = *f.fe_max;
    for (auto& o : cfg.overrides) o.algo.erase("fe_max");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_or_default(const CommonFlags& f) {
  if (!f.config.empty()) return resolve(f, load_config(f.config));
  // variance-demo runs without a file: the LZG suite in 20 dimensions.
  return resolve(f, parse_config({{"problems", nlohmann::json::array({"lzg"})}, {"dims", nlohmann::json::array({20})}}));
}

RunOptions options_for(const CommonFlags& f) {
  RunOptions o;
  o.force = f.force;
  if (!f.quiet) o.log = [](const std::string& msg) { fmt::print(stderr, "{}\n", msg); };
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-assisted EDA with dual relation models: experiment runner"};
  app.require_subcommand(1);

  CommonFlags run_flags, acc_flags, var_flags;
  std::string curves_dir;
  auto* run = app.add_subcommand("run", "run every configured (problem, variant) cell");
  add_common(run, run_flags, true);
  auto* acc = app.add_subcommand("accuracy", "surrogate selection accuracy over stored generations");
  add_common(acc, acc_flags, true);
  auto* var = app.add_subcommand("variance-demo", "select-N vs select-1 plain EDA comparison");
  add_common(var, var_flags, false);
  auto* curves = app.add_subcommand("curves", "median/IQR convergence curves from completed runs");
  curves->add_option("dir", curves_dir, "output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = resolve(run_flags, load_config(run_flags.config));
      const auto report = cmd_run(cfg, options_for(run_flags));
      fmt::print("{}", report.table.to_text());
      fmt::print("{} new traces; results in {}\n", report.traces_written, cfg.output_dir.string());
    } else if (*acc) {
      const auto cfg = resolve(acc_flags, load_config(acc_flags.config));
      const auto summary = cmd_accuracy(cfg, options_for(acc_flags));
      fmt::print("{:<20} {:<12} {:>10} {:>10}\n", "problem", "surrogate", "mean acc1", "mean acc2");
      for (const auto& s : summary) {
        fmt::print("{:<20} {:<12} {:>10.3f} {:>10.3f}\n", s.problem, surrogate_name(s.surrogate), s.mean_acc1,
                   s.mean_acc2);
      }
    } else if (*var) {
      const auto cfg = load_or_default(var_flags);
      const auto table = cmd_variance_demo(cfg, options_for(var_flags));
      fmt::print("{}", table.to_text());
    } else if (*curves) {
      for (const auto& p : cmd_curves(curves_dir)) fmt::print("{}\n", p.string());
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
