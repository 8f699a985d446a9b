#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "drso/core.hpp"

namespace drso {

enum class Criterion { C1, C2 };

/// Where a C2 zero label came from is kept so balancing can draw from each
/// side separately; the learner only sees the collapsed label.
enum class Provenance : std::uint8_t { Plus1, Minus1, Plus0, Minus0 };

int label_of(Provenance p);

struct RelationPair {
  std::uint32_t first;   // index of x_i in the source solutions
  std::uint32_t second;  // index of x_j
  int label;             // +1, -1 or 0
  Provenance provenance;
};

struct RelationDataset {
  Criterion criterion = Criterion::C1;
  double threshold_t = 0.0;  // C2 only
  std::vector<DecisionVector> solutions;
  std::vector<RelationPair> pairs;

  std::size_t source_count() const { return solutions.size(); }
  std::size_t dim() const { return solutions.empty() ? 0 : solutions.front().size(); }
  std::size_t size() const { return pairs.size(); }
  std::size_t count(Provenance p) const;

  /// x_i followed by x_j, length 2n.
  DecisionVector feature(std::size_t k) const;
  std::vector<double> labels() const;
};

struct CategoryAssignment {
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
};

/// The round(t * size) best solutions (at least one) are good; ties keep input order.
CategoryAssignment assign_categories(std::span<const EvaluatedSolution> solutions, double t);

/// Every ordered pair (i, j), i != j: +1 iff f(x_i) < f(x_j), otherwise -1.
RelationDataset build_c1(std::span<const EvaluatedSolution> solutions);

struct C2Build {
  RelationDataset dataset;
  CategoryAssignment categories;
};

/// Category-criterion pairs before balancing.
C2Build build_c2(std::span<const EvaluatedSolution> solutions, double t);

/// Down-samples the zero-labelled pairs so each of the three labels has
/// theta = |plus1| members where enough zeros exist.
RelationDataset balance_labels(const RelationDataset& dataset, RngStream& rng);

}  // namespace drso
