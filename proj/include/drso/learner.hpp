#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drso/core.hpp"

namespace drso {

/// Row-major feature matrix stored as column blocks. Each row picks one entry
/// of every block's table, so a pair dataset over alpha solutions stores the
/// alpha vectors once and two keys per row. Dense data is one block whose
/// table has one entry per row.
class FeatureMatrix {
 public:
  struct Block {
    std::size_t col_begin = 0;
    std::size_t width = 0;
    std::size_t entries = 0;
    std::vector<double> values;       // entries x width
    std::vector<std::uint32_t> keys;  // one per row
  };

  static FeatureMatrix dense(std::span<const std::vector<double>> rows);
  /// Row k is table[pairs[k].first] followed by table[pairs[k].second].
  static FeatureMatrix pairs(std::span<const DecisionVector> table,
                             std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t row, std::size_t col) const;
  std::vector<double> row(std::size_t r) const;
  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Block> blocks_;
};

enum class Objective { BinaryLogistic, Softmax, SquaredError };

const char* objective_name(Objective o);
Objective parse_objective(const std::string& name);

/// BinaryLogistic expects labels in {-1, +1}; Softmax is the three-class
/// problem with labels {-1, 0, +1}; SquaredError takes any real label.
struct TrainConfig {
  int rounds = 50;
  int max_depth = 6;
  double learning_rate = 0.3;
  double min_child_weight = 1.0;
  double lambda_l2 = 1.0;
  Objective objective = Objective::BinaryLogistic;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight, already scaled by the learning rate
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  std::size_t leaves() const;
};

inline constexpr std::size_t kSoftmaxClasses = 3;

class TreeEnsembleModel {
 public:
  TreeEnsembleModel(Objective objective, std::size_t feature_count, double base_score,
                    std::vector<RegressionTree> trees);

  Objective objective() const { return objective_; }
  std::size_t feature_count() const { return feature_count_; }
  double base_score() const { return base_score_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::size_t rounds() const;

  /// -1/+1 for binary (p >= 0.5 gives +1); -1/0/+1 for softmax (argmax, lowest class on ties).
  int predict_label(std::span<const double> x) const;
  /// predict_label over row_count rows stored back to back.
  std::vector<int> predict_labels(std::span<const double> rows, std::size_t row_count) const;
  /// Regression output.
  double predict_value(std::span<const double> x) const;
  /// P(label = +1) for the binary objective.
  double predict_probability(std::span<const double> x) const;
  /// Class probabilities ordered (-1, 0, +1) for the softmax objective.
  std::array<double, kSoftmaxClasses> predict_proba(std::span<const double> x) const;

  /// Mean training loss of the objective on a dataset.
  double loss(const FeatureMatrix& features, std::span<const double> labels) const;

  std::string dump() const;

 private:
  void check_dim(std::span<const double> x) const;
  std::array<double, kSoftmaxClasses> margins3(std::span<const double> x) const;
  double margin(std::span<const double> x) const;

  // Trees laid out for lock-step batch traversal: leaves point to themselves
  // and always branch left, so every row can take exactly `depth` steps.
  struct FlatTree {
    std::vector<std::uint32_t> feature;
    std::vector<double> threshold;
    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    std::vector<double> value;
    std::size_t depth = 0;
  };
  void margins_batch(std::span<const double> rows, std::size_t row_count, std::vector<double>& out) const;

  Objective objective_;
  std::size_t feature_count_;
  double base_score_;
  // Softmax trees are stored round-major: tree r * 3 + k belongs to class k.
  std::vector<RegressionTree> trees_;
  std::vector<FlatTree> flat_;
};

/// Second-order gradient boosting with exact greedy split search: every
/// midpoint between consecutive distinct feature values present in a node is
/// a candidate. No row or column subsampling, so the stream is not consumed.
TreeEnsembleModel train(const FeatureMatrix& features, std::span<const double> labels,
                        const TrainConfig& config, RngStream& rng);

}  // namespace drso
