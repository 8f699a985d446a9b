#include "drso/reproduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace drso {

void ReproductionConfig::validate() const {
  if (m_bins < 3) throw std::invalid_argument("reproduction.m_bins must be at least 3");
  if (!(end_bin_value >= 0.0)) throw std::invalid_argument("reproduction.end_bin_value must be >= 0");
  if (!(local_ratio >= 0.0 && local_ratio <= 1.0)) {
    throw std::invalid_argument("reproduction.local_ratio must lie in [0, 1]");
  }
  if (!(jitter_fraction >= 0.0)) throw std::invalid_argument("reproduction.jitter_fraction must be >= 0");
}

VwhModel build_vwh(std::span<const DecisionVector> parents, const Bounds& bounds,
                   std::size_t m_bins, double end_bin_value) {
  if (parents.empty()) throw std::invalid_argument("build_vwh: no parents");
  if (m_bins < 3) throw std::invalid_argument("build_vwh: need at least 3 bins");
  const std::size_t n = bounds.dim();
  const std::size_t middle = m_bins - 2;
  VwhModel model{bounds, m_bins, {}, {}};
  model.edges.resize(n);
  model.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = parents[0].at(j);
    double hi = lo;
    for (const auto& p : parents) {
      if (p.size() != n) throw DimensionMismatch("build_vwh: parent dimension differs from bounds");
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    lo = std::clamp(lo, bounds.lower(j), bounds.upper(j));
    hi = std::clamp(hi, bounds.lower(j), bounds.upper(j));

    auto& edges = model.edges[j];
    auto& w = model.weights[j];
    edges.resize(m_bins + 1);
    w.assign(m_bins, 0.0);
    edges[0] = bounds.lower(j);
    const double step = (hi - lo) / static_cast<double>(middle);
    for (std::size_t k = 0; k <= middle; ++k) edges[1 + k] = lo + step * static_cast<double>(k);
    edges[middle + 1] = hi;
    edges[m_bins] = bounds.upper(j);

    if (hi > lo) {
      for (const auto& p : parents) {
        const double v = std::clamp(p[j], lo, hi);
        auto k = static_cast<std::size_t>((v - lo) / step);
        k = std::min(k, middle - 1);
        w[1 + k] += 1.0;
      }
    }
    if (edges[1] > edges[0]) w[0] = end_bin_value;
    if (edges[m_bins] > edges[m_bins - 1]) w[m_bins - 1] = end_bin_value;
  }
  return model;
}

std::vector<DecisionVector> sample_vwh(const VwhModel& model, std::size_t count, RngStream& rng) {
  const std::size_t n = model.bounds.dim();
  std::vector<DecisionVector> out(count, DecisionVector(n));
  std::vector<std::vector<double>> cumulative(n);
  for (std::size_t j = 0; j < n; ++j) {
    cumulative[j].resize(model.bins);
    std::partial_sum(model.weights[j].begin(), model.weights[j].end(), cumulative[j].begin());
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cum = cumulative[j];
      const double total = cum.back();
      double v;
      if (!(total > 0.0)) {
        v = rng.uniform(model.bounds.lower(j), model.bounds.upper(j));
      } else {
        const double r = rng.uniform() * total;
        auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
        k = std::min(k, model.bins - 1);
        // Zero-weight bins have cum equal to their predecessor and are never chosen.
        v = rng.uniform(model.edges[j][k], model.edges[j][k + 1]);
      }
      out[i][j] = std::clamp(v, model.bounds.lower(j), model.bounds.upper(j));
    }
  }
  return out;
}

std::vector<DecisionVector> local_search_offspring(std::span<const EvaluatedSolution> evaluated,
                                                   std::size_t count, const Bounds& bounds,
                                                   RngStream& rng, double jitter_fraction) {
  if (evaluated.size() < 3) {
    throw std::invalid_argument("local_search_offspring: need at least 3 evaluated parents");
  }
  if (count == 0) return {};
  const std::size_t n = bounds.dim();
  std::vector<std::size_t> order(evaluated.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return evaluated[a].f < evaluated[b].f; });
  const auto& s1 = evaluated[order[0]];
  const auto& s2 = evaluated[order[1]];
  const auto& s3 = evaluated[order[2]];

  // NaN marks dimensions that fall back to jitter.
  std::vector<double> vertex(n, std::nan(""));
  for (std::size_t j = 0; j < n; ++j) {
    const double x1 = s1.x.at(j), x2 = s2.x.at(j), x3 = s3.x.at(j);
    if (x1 == x2 || x1 == x3 || x2 == x3) continue;
    const double d12 = (s2.f - s1.f) / (x2 - x1);
    const double d13 = (s3.f - s1.f) / (x3 - x1);
    const double curvature = (d13 - d12) / (x3 - x2);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) continue;
    const double slope = d12 - curvature * (x1 + x2);
    const double v = -slope / (2.0 * curvature);
    if (std::isfinite(v) && v >= bounds.lower(j) && v <= bounds.upper(j)) vertex[j] = v;
  }

  std::vector<DecisionVector> out(count, DecisionVector(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = vertex[j];
      if (std::isnan(v)) v = s1.x[j] + jitter_fraction * bounds.width(j) * rng.normal();
      out[i][j] = std::clamp(v, bounds.lower(j), bounds.upper(j));
    }
  }
  return out;
}

std::vector<DecisionVector> reproduce(std::span<const EvaluatedSolution> evaluated,
                                      std::span<const DecisionVector> unevaluated,
                                      std::size_t n_offspring, const Bounds& bounds,
                                      const ReproductionConfig& config, RngStream& rng) {
  config.validate();
  if (evaluated.size() < 3) throw std::invalid_argument("reproduce: need at least 3 evaluated parents");
  const auto n_local = std::min<std::size_t>(
      n_offspring,
      static_cast<std::size_t>(std::llround(config.local_ratio * static_cast<double>(n_offspring))));

  std::vector<DecisionVector> parents = vectors_of(evaluated);
  parents.insert(parents.end(), unevaluated.begin(), unevaluated.end());
  const VwhModel model = build_vwh(parents, bounds, config.m_bins, config.end_bin_value);

  std::vector<DecisionVector> q = sample_vwh(model, n_offspring - n_local, rng);
  for (auto& x : local_search_offspring(evaluated, n_local, bounds, rng, config.jitter_fraction)) {
    q.push_back(std::move(x));
  }
  rng.shuffle(q);
  return q;
}

}  // namespace drso
