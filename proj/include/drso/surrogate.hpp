#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drso/core.hpp"
#include "drso/learner.hpp"
#include "drso/relation_data.hpp"

namespace drso {

/// Predicts the label of an ordered pair <a, b>.
class RelationModel {
 public:
  virtual ~RelationModel() = default;
  virtual int predict(std::span<const double> a, std::span<const double> b) const = 0;

  /// Votes of u against every x: first[i] = M(<x_i, u>), second[i] = M(<u, x_i>).
  virtual void vote(std::span<const double> u, std::span<const DecisionVector> xs,
                    std::vector<int>& first, std::vector<int>& second) const;
};

/// Relation model backed by a boosted tree ensemble over concatenated pairs.
class TreeRelationModel final : public RelationModel {
 public:
  explicit TreeRelationModel(TreeEnsembleModel model);
  int predict(std::span<const double> a, std::span<const double> b) const override;
  void vote(std::span<const double> u, std::span<const DecisionVector> xs, std::vector<int>& first,
            std::vector<int>& second) const override;
  const TreeEnsembleModel& model() const { return model_; }

 private:
  TreeEnsembleModel model_;
};

using Fitness = std::function<double(std::span<const double>)>;

/// Answers C1 queries from true fitness: +1 iff f(a) < f(b).
class FitnessOracleC1 final : public RelationModel {
 public:
  explicit FitnessOracleC1(Fitness f) : f_(std::move(f)) {}
  int predict(std::span<const double> a, std::span<const double> b) const override;

 private:
  Fitness f_;
};

/// Answers C2 queries from true fitness: a solution is good iff f < boundary.
class FitnessOracleC2 final : public RelationModel {
 public:
  FitnessOracleC2(Fitness f, double boundary) : f_(std::move(f)), boundary_(boundary) {}
  int predict(std::span<const double> a, std::span<const double> b) const override;

 private:
  Fitness f_;
  double boundary_;
};

struct RelationSurrogatePair {
  std::shared_ptr<const RelationModel> m1;  // fitness criterion, labels {-1, +1}
  std::shared_ptr<const RelationModel> m2;  // category criterion, labels {-1, 0, +1}
  std::vector<DecisionVector> training_solutions;
  CategoryAssignment categories;
};

/// Trains the requested relation models on the given (top-alpha) solutions.
RelationSurrogatePair train_relation_surrogate(std::span<const EvaluatedSolution> training,
                                               double t, const TrainConfig& c1_config,
                                               const TrainConfig& c2_config, RngStream& rng,
                                               bool want_m1 = true, bool want_m2 = true);

/// S1 from the two vote lists: c(II,+1) + c(I,-1) - c(I,+1) - c(II,-1).
int c1_score_from_votes(std::span<const int> first, std::span<const int> second);

/// S2 from the four vote groups, divided by the training-set size. I/II are
/// votes against good x (<x,u> and <u,x>); III/IV are the same against bad x.
double c2_score_from_votes(std::span<const int> good_first, std::span<const int> good_second,
                           std::span<const int> bad_first, std::span<const int> bad_second,
                           std::size_t training_size);

int score_c1(const RelationSurrogatePair& surrogate, std::span<const double> u);
double score_c2(const RelationSurrogatePair& surrogate, std::span<const double> u);

/// Argmax of S1; ties go to the lowest index.
std::pair<std::size_t, DecisionVector> select_best(std::span<const DecisionVector> candidates,
                                                   const RelationSurrogatePair& surrogate);

/// Indices with S2 > 0 in candidate order, skipping `exclude`.
std::vector<std::size_t> unevaluated_indices(std::span<const DecisionVector> candidates,
                                             const RelationSurrogatePair& surrogate,
                                             std::optional<std::size_t> exclude);

std::vector<DecisionVector> select_unevaluated(std::span<const DecisionVector> candidates,
                                               const RelationSurrogatePair& surrogate,
                                               std::optional<std::size_t> exclude);

enum class BaselineMode { Regression, Classification };

struct BaselineSelection {
  std::size_t best = 0;               // argmin prediction, or argmax P(good)
  std::vector<std::size_t> positive;  // predicted good (classification only)
};

/// Regressor trained on (x, f) of the given solutions.
TreeEnsembleModel train_fitness_regressor(std::span<const EvaluatedSolution> training,
                                          const TrainConfig& config, RngStream& rng);

/// Binary classifier on the good (+1) / bad (-1) split at threshold t.
TreeEnsembleModel train_category_classifier(std::span<const EvaluatedSolution> training, double t,
                                            const TrainConfig& config, RngStream& rng);

BaselineSelection baseline_select(std::span<const DecisionVector> candidates,
                                  const TreeEnsembleModel& model, BaselineMode mode);

}  // namespace drso
