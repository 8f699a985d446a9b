#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drso/core.hpp"

namespace drso {

/// A benchmark instance. Evaluators are stateless; the one noisy member
/// (yllf07) draws its additive noise from the caller's stream.
class Problem {
 public:
  using Objective = std::function<double(std::span<const double>)>;

  Problem(std::string name, Bounds bounds, Objective objective, bool noisy,
          std::optional<DecisionVector> optimizer);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return bounds_.dim(); }
  const Bounds& bounds() const { return bounds_; }
  bool noisy() const { return noisy_; }

  /// Noise-free objective value at the known optimizer, if one is defined.
  std::optional<double> known_optimum_value() const { return optimum_value_; }
  const std::optional<DecisionVector>& known_optimizer() const { return optimizer_; }

  /// Noise-free value.
  double evaluate(std::span<const double> x) const;
  /// Value including the noise term (if any) drawn from rng.
  double evaluate(std::span<const double> x, RngStream& rng) const;

 private:
  std::string name_;
  Bounds bounds_;
  Objective objective_;
  bool noisy_;
  std::optional<DecisionVector> optimizer_;
  std::optional<double> optimum_value_;
};

struct ProblemSpec {
  std::string name;
  std::size_t dim;
  Bounds bounds;
  std::optional<double> known_optimum_value;
};

/// Registry identifiers, LZG suite first.
const std::vector<std::string>& problem_names();
const std::vector<std::string>& lzg_names();

/// Throws std::invalid_argument for unknown names or n < 2.
Problem make_problem(const std::string& name, std::size_t n);

std::vector<ProblemSpec> suite_registry(std::size_t dim);

/// One real evaluation: checks the budget, evaluates, inserts into the archive.
EvaluatedSolution evaluate_and_record(const Problem& problem, const DecisionVector& x,
                                      Archive& archive, RngStream& rng);

}  // namespace drso
