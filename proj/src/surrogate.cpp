#include "drso/surrogate.hpp"

#include <algorithm>
#include <stdexcept>

namespace drso {

void RelationModel::vote(std::span<const double> u, std::span<const DecisionVector> xs,
                         std::vector<int>& first, std::vector<int>& second) const {
  first.resize(xs.size());
  second.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    first[i] = predict(xs[i], u);
    second[i] = predict(u, xs[i]);
  }
}

TreeRelationModel::TreeRelationModel(TreeEnsembleModel model) : model_(std::move(model)) {
  if (model_.objective() == Objective::SquaredError) {
    throw std::invalid_argument("TreeRelationModel: needs a classification ensemble");
  }
}

int TreeRelationModel::predict(std::span<const double> a, std::span<const double> b) const {
  std::vector<double> feature(a.begin(), a.end());
  feature.insert(feature.end(), b.begin(), b.end());
  return model_.predict_label(feature);
}

void TreeRelationModel::vote(std::span<const double> u, std::span<const DecisionVector> xs,
                             std::vector<int>& first, std::vector<int>& second) const {
  const std::size_t n = u.size();
  if (2 * n != model_.feature_count()) throw DimensionMismatch("vote: candidate dimension differs");
  // Rows 2i and 2i+1 hold <x_i, u> and <u, x_i>.
  std::vector<double> buf(4 * n * xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != n) throw DimensionMismatch("vote: training vector dimension differs");
    auto* row = buf.data() + 4 * n * i;
    std::copy(xs[i].begin(), xs[i].end(), row);
    std::copy(u.begin(), u.end(), row + n);
    std::copy(u.begin(), u.end(), row + 2 * n);
    std::copy(xs[i].begin(), xs[i].end(), row + 3 * n);
  }
  const auto labels = model_.predict_labels(buf, 2 * xs.size());
  first.resize(xs.size());
  second.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    first[i] = labels[2 * i];
    second[i] = labels[2 * i + 1];
  }
}

int FitnessOracleC1::predict(std::span<const double> a, std::span<const double> b) const {
  return f_(a) < f_(b) ? 1 : -1;
}

int FitnessOracleC2::predict(std::span<const double> a, std::span<const double> b) const {
  const bool good_a = f_(a) < boundary_;
  const bool good_b = f_(b) < boundary_;
  if (good_a == good_b) return 0;
  return good_a ? 1 : -1;
}

RelationSurrogatePair train_relation_surrogate(std::span<const EvaluatedSolution> training,
                                               double t, const TrainConfig& c1_config,
                                               const TrainConfig& c2_config, RngStream& rng,
                                               bool want_m1, bool want_m2) {
  RelationSurrogatePair s;
  s.training_solutions = vectors_of(training);
  auto pair_matrix = [&](const RelationDataset& ds) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> idx;
    idx.reserve(ds.pairs.size());
    for (const auto& p : ds.pairs) idx.emplace_back(p.first, p.second);
    return FeatureMatrix::pairs(ds.solutions, idx);
  };
  if (want_m1) {
    const RelationDataset ds = build_c1(training);
    TrainConfig cfg = c1_config;
    cfg.objective = Objective::BinaryLogistic;
    s.m1 = std::make_shared<TreeRelationModel>(train(pair_matrix(ds), ds.labels(), cfg, rng));
  }
  // Categories are needed for S2 even when only M1 is trained.
  s.categories = assign_categories(training, t);
  if (want_m2) {
    C2Build built = build_c2(training, t);
    const RelationDataset ds = balance_labels(built.dataset, rng);
    TrainConfig cfg = c2_config;
    cfg.objective = Objective::Softmax;
    s.m2 = std::make_shared<TreeRelationModel>(train(pair_matrix(ds), ds.labels(), cfg, rng));
    s.categories = std::move(built.categories);
  }
  return s;
}

int c1_score_from_votes(std::span<const int> first, std::span<const int> second) {
  int s = 0;
  for (int l : first) s += l == -1 ? 1 : (l == 1 ? -1 : 0);
  for (int l : second) s += l == 1 ? 1 : (l == -1 ? -1 : 0);
  return s;
}

double c2_score_from_votes(std::span<const int> good_first, std::span<const int> good_second,
                           std::span<const int> bad_first, std::span<const int> bad_second,
                           std::size_t training_size) {
  if (training_size == 0) throw std::invalid_argument("c2 score: empty training set");
  // Each vote group rewards one label set and penalises the rest.
  auto tally = [](std::span<const int> votes, int plus_if_1, int plus_if_0, int plus_if_m1) {
    int s = 0;
    for (int l : votes) s += l == 1 ? plus_if_1 : (l == 0 ? plus_if_0 : plus_if_m1);
    return s;
  };
  const int total = tally(good_first, -1, +1, +1)    // <x_good, u>
                    + tally(good_second, +1, +1, -1)  // <u, x_good>
                    + tally(bad_first, -1, -1, +1)    // <x_bad, u>
                    + tally(bad_second, +1, -1, -1);  // <u, x_bad>
  return static_cast<double>(total) / static_cast<double>(training_size);
}

int score_c1(const RelationSurrogatePair& surrogate, std::span<const double> u) {
  if (!surrogate.m1) throw std::logic_error("score_c1: surrogate has no fitness-criterion model");
  std::vector<int> first;
  std::vector<int> second;
  surrogate.m1->vote(u, surrogate.training_solutions, first, second);
  return c1_score_from_votes(first, second);
}

double score_c2(const RelationSurrogatePair& surrogate, std::span<const double> u) {
  if (!surrogate.m2) throw std::logic_error("score_c2: surrogate has no category-criterion model");
  const auto& cat = surrogate.categories;
  std::vector<DecisionVector> good;
  std::vector<DecisionVector> bad;
  for (std::size_t i : cat.good) good.push_back(surrogate.training_solutions.at(i));
  for (std::size_t i : cat.bad) bad.push_back(surrogate.training_solutions.at(i));
  std::vector<int> g1, g2, b1, b2;
  surrogate.m2->vote(u, good, g1, g2);
  surrogate.m2->vote(u, bad, b1, b2);
  return c2_score_from_votes(g1, g2, b1, b2, good.size() + bad.size());
}

std::pair<std::size_t, DecisionVector> select_best(std::span<const DecisionVector> candidates,
                                                   const RelationSurrogatePair& surrogate) {
  if (candidates.empty()) throw std::invalid_argument("select_best: no candidates");
  std::size_t best = 0;
  int best_score = score_c1(surrogate, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const int s = score_c1(surrogate, candidates[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return {best, candidates[best]};
}

std::vector<std::size_t> unevaluated_indices(std::span<const DecisionVector> candidates,
                                             const RelationSurrogatePair& surrogate,
                                             std::optional<std::size_t> exclude) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (exclude && *exclude == i) continue;
    if (score_c2(surrogate, candidates[i]) > 0.0) out.push_back(i);
  }
  return out;
}

std::vector<DecisionVector> select_unevaluated(std::span<const DecisionVector> candidates,
                                               const RelationSurrogatePair& surrogate,
                                               std::optional<std::size_t> exclude) {
  std::vector<DecisionVector> out;
  for (std::size_t i : unevaluated_indices(candidates, surrogate, exclude)) out.push_back(candidates[i]);
  return out;
}

TreeEnsembleModel train_fitness_regressor(std::span<const EvaluatedSolution> training,
                                          const TrainConfig& config, RngStream& rng) {
  const auto xs = vectors_of(training);
  std::vector<double> y;
  for (const auto& s : training) y.push_back(s.f);
  TrainConfig cfg = config;
  cfg.objective = Objective::SquaredError;
  return train(FeatureMatrix::dense(xs), y, cfg, rng);
}

TreeEnsembleModel train_category_classifier(std::span<const EvaluatedSolution> training, double t,
                                            const TrainConfig& config, RngStream& rng) {
  const CategoryAssignment cat = assign_categories(training, t);
  std::vector<double> y(training.size(), -1.0);
  for (std::size_t i : cat.good) y[i] = 1.0;
  TrainConfig cfg = config;
  cfg.objective = Objective::BinaryLogistic;
  return train(FeatureMatrix::dense(vectors_of(training)), y, cfg, rng);
}

BaselineSelection baseline_select(std::span<const DecisionVector> candidates,
                                  const TreeEnsembleModel& model, BaselineMode mode) {
  if (candidates.empty()) throw std::invalid_argument("baseline_select: no candidates");
  const bool regression = model.objective() == Objective::SquaredError;
  if (regression != (mode == BaselineMode::Regression) ||
      model.objective() == Objective::Softmax) {
    throw std::invalid_argument(std::string("baseline_select: model objective ") +
                                objective_name(model.objective()) + " does not fit the mode");
  }
  BaselineSelection sel;
  if (regression) {
    double best = model.predict_value(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const double v = model.predict_value(candidates[i]);
      if (v < best) {
        best = v;
        sel.best = i;
      }
    }
    return sel;
  }
  double best = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double p = model.predict_probability(candidates[i]);
    if (p > best) {
      best = p;
      sel.best = i;
    }
    if (p >= 0.5) sel.positive.push_back(i);
  }
  return sel;
}

}  // namespace drso
