#pragma once

#include <span>
#include <vector>

#include "drso/core.hpp"

namespace drso {

struct ReproductionConfig {
  std::size_t m_bins = 15;
  double end_bin_value = 0.1;
  double local_ratio = 0.2;
  /// Fallback jitter of local search, as a fraction of each dimension's width.
  double jitter_fraction = 0.01;

  void validate() const;
};

/// Variable-width histogram: per dimension, bin 0 is [a, L), bins 1..M-2
/// split [L, U] evenly, bin M-1 is [U, b], where L and U are the parents'
/// min and max. Middle bins hold parent counts, end bins a small constant.
struct VwhModel {
  Bounds bounds;
  std::size_t bins;
  std::vector<std::vector<double>> edges;    // per dimension, bins + 1 entries
  std::vector<std::vector<double>> weights;  // per dimension, bins entries
};

VwhModel build_vwh(std::span<const DecisionVector> parents, const Bounds& bounds,
                   std::size_t m_bins, double end_bin_value = 0.1);

/// Per coordinate: pick a bin with probability proportional to its value,
/// then a uniform point inside it. A dimension whose bins are all zero is
/// sampled uniformly over the domain.
std::vector<DecisionVector> sample_vwh(const VwhModel& model, std::size_t count, RngStream& rng);

/// Per dimension, a parabola through the three best evaluated solutions
/// (coordinate vs fitness). A convex fit whose vertex lies in the domain
/// gives the vertex; otherwise the best coordinate plus Gaussian jitter.
std::vector<DecisionVector> local_search_offspring(std::span<const EvaluatedSolution> evaluated,
                                                   std::size_t count, const Bounds& bounds,
                                                   RngStream& rng, double jitter_fraction = 0.01);

/// Offspring from the histogram over evaluated and unevaluated parents plus
/// round(local_ratio * n_offspring) local-search points, shuffled together.
std::vector<DecisionVector> reproduce(std::span<const EvaluatedSolution> evaluated,
                                      std::span<const DecisionVector> unevaluated,
                                      std::size_t n_offspring, const Bounds& bounds,
                                      const ReproductionConfig& config, RngStream& rng);

}  // namespace drso
