#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "drso/optimizer.hpp"
#include "drso/stats.hpp"

namespace drso::harness {

namespace fs = std::filesystem;

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProblemEntry {
  std::string name;
  std::size_t dim = 20;

  /// "ellipsoid-20d"
  std::string key() const;
};

struct CellOverride {
  std::optional<std::string> problem;
  std::optional<std::size_t> dim;
  std::optional<Variant> variant;
  nlohmann::json algo;  // merge patch over the base algo object
};

enum class SurrogateKind { RC1, RC2, Regressor, Classifier, Random, Oracle };

const char* surrogate_name(SurrogateKind k);
SurrogateKind parse_surrogate(const std::string& name);
const std::vector<SurrogateKind>& all_surrogates();

struct AccuracyOptions {
  std::size_t generations = 50;
  std::size_t population_size = 50;
  double t = 0.5;
  std::vector<SurrogateKind> surrogates = all_surrogates();
  TrainConfig fitness_model{.objective = Objective::BinaryLogistic};
  TrainConfig category_model{.objective = Objective::Softmax};
  TrainConfig regressor{.objective = Objective::SquaredError};
  TrainConfig classifier{.objective = Objective::BinaryLogistic};
  ReproductionConfig reproduction;
};

struct VarianceOptions {
  std::size_t generations = 150;
  std::size_t population_size = 50;
};

struct ExperimentConfig {
  std::vector<ProblemEntry> problems;
  std::vector<Variant> variants{Variant::Full};
  std::size_t runs = 30;
  std::uint64_t seed = 20240601;
  std::size_t jobs = 1;
  std::string reference;  // defaults to "full" when present, else the first variant
  fs::path output_dir = "out";
  nlohmann::json algo = nlohmann::json::object();
  std::vector<CellOverride> overrides;
  AccuracyOptions accuracy;
  VarianceOptions variance;

  /// Base algo settings patched by every matching override, in order.
  AlgoConfig algo_for(const ProblemEntry& p, Variant v) const;
  std::string reference_name() const;
  /// Re-checks every cell; call after editing fields by hand.
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const fs::path& file);

/// base XOR a mix of FNV-1a("problem|variant|run").
std::uint64_t derive_seed(std::uint64_t base, const std::string& problem_key,
                          const std::string& variant, std::size_t run);

std::string trace_csv(const RunTrace& trace);
void write_text_atomic(const fs::path& file, const std::string& text);
std::vector<TraceRecord> read_trace_csv(const fs::path& file);

using Logger = std::function<void(const std::string&)>;

struct RunOptions {
  bool force = false;
  std::optional<std::size_t> jobs;
  Logger log;
};

struct CellResult {
  ProblemEntry problem;
  std::string variant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> finals;
  bool skipped = false;
};

struct RunReport {
  std::vector<CellResult> cells;
  std::size_t traces_written = 0;
  stats::SummaryTable table;
};

/// Runs every (problem, variant) cell and writes
///   <out>/runs/<problem-key>/<variant>/run_NNN.csv and summary.json,
///   <out>/comparison.{csv,txt,md}.
/// Cells whose summary.json matches the current settings are skipped unless forced.
RunReport cmd_run(const ExperimentConfig& config, const RunOptions& options = {});

struct AccuracyRecord {
  std::string problem;
  std::size_t generation = 0;
  SurrogateKind surrogate = SurrogateKind::RC1;
  std::size_t acc1 = 0;
  double acc2 = 0.0;
  std::size_t selected = 0;  // size of the predicted top set
};

/// Optimizer-free protocol: a select-N EDA evolves parents by true fitness;
/// every generation each surrogate is trained on the parents and judged on
/// the offspring.
std::vector<AccuracyRecord> run_accuracy_study(const Problem& problem, const AccuracyOptions& options,
                                               std::uint64_t seed);

struct AccuracySummary {
  std::string problem;
  SurrogateKind surrogate = SurrogateKind::RC1;
  std::size_t generations = 0;
  double mean_acc1 = 0.0, std_acc1 = 0.0, median_acc1 = 0.0, q25_acc1 = 0.0, q75_acc1 = 0.0;
  double mean_acc2 = 0.0, std_acc2 = 0.0, median_acc2 = 0.0, q25_acc2 = 0.0, q75_acc2 = 0.0;
};

std::vector<AccuracySummary> summarize_accuracy(const std::vector<AccuracyRecord>& records);

/// Writes <out>/accuracy/generations.csv and summary.csv.
std::vector<AccuracySummary> cmd_accuracy(const ExperimentConfig& config, const RunOptions& options = {});

/// select-N vs select-1 plain EDA on every configured problem; writes
/// <out>/variance/... and the comparison tables, reference select-N.
stats::SummaryTable cmd_variance_demo(const ExperimentConfig& config, const RunOptions& options = {});

/// Median and quartiles of best-so-far per fes for every cell under
/// <dir>/runs, written to <dir>/curves/<problem-key>__<variant>.csv.
std::vector<fs::path> cmd_curves(const fs::path& dir);

}  // namespace drso::harness
