#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drso/core.hpp"
#include "drso/learner.hpp"
#include "drso/problems.hpp"
#include "drso/reproduction.hpp"

namespace drso {

/// Ablation variants of the optimizer.
enum class Variant {
  Full,
  Sel1RandomPu,      // P_u drawn at random, no category model
  Sel2RandomQbest,   // Q_best drawn at random, no fitness model
  Gen1NoPu,          // offspring from evaluated parents only
  Gen2NoLocalSearch, // local_ratio forced to 0
  ModRegressionClassification,  // regressor picks Q_best, classifier picks P_u
};

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
const std::vector<Variant>& all_variants();

struct AlgoConfig {
  std::size_t population_size = 50;
  std::size_t fe_max = 500;
  std::size_t alpha = 50;
  double t = 0.5;
  ReproductionConfig reproduction;
  TrainConfig fitness_model{.objective = Objective::BinaryLogistic};
  TrainConfig category_model{.objective = Objective::Softmax};
  TrainConfig regressor{.objective = Objective::SquaredError};
  TrainConfig classifier{.objective = Objective::BinaryLogistic};
  Variant variant = Variant::Full;

  void validate() const;
};

struct TraceRecord {
  std::size_t fes;
  double f;
  double best_so_far;
};

struct RunTrace {
  std::string problem;
  std::string algorithm;
  std::uint64_t seed = 0;
  AlgoConfig config;
  std::vector<TraceRecord> records;  // one per real evaluation
  std::vector<EvaluatedSolution> archive;
  double wall_seconds = 0.0;

  double final_best() const;
};

/// Surrogate-assisted loop: LHS start, then one real evaluation per iteration
/// until the budget is spent.
RunTrace run_drso(const Problem& problem, const AlgoConfig& config, std::uint64_t seed);

enum class SelectionMode { SelectN, Select1 };

const char* selection_mode_name(SelectionMode m);

/// Surrogate-free histogram EDA: select-N evaluates every offspring, select-1
/// evaluates one offspring chosen uniformly at random. Parents are the N best
/// of parents and evaluated offspring.
RunTrace run_plain_eda(const Problem& problem, SelectionMode mode, std::size_t generations,
                       std::size_t population_size, std::uint64_t seed,
                       const ReproductionConfig& reproduction = {});

}  // namespace drso
