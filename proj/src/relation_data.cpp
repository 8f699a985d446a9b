#include "drso/relation_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace drso {

int label_of(Provenance p) {
  switch (p) {
    case Provenance::Plus1:
      return 1;
    case Provenance::Minus1:
      return -1;
    case Provenance::Plus0:
    case Provenance::Minus0:
      return 0;
  }
  return 0;
}

std::size_t RelationDataset::count(Provenance p) const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [p](const RelationPair& r) { return r.provenance == p; }));
}

DecisionVector RelationDataset::feature(std::size_t k) const {
  const auto& pair = pairs.at(k);
  const auto& a = solutions[pair.first];
  const auto& b = solutions[pair.second];
  DecisionVector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<double> RelationDataset::labels() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(static_cast<double>(p.label));
  return out;
}

namespace {

void check_sources(std::span<const EvaluatedSolution> solutions, const char* who) {
  if (solutions.size() < 2) {
    throw std::invalid_argument(std::string(who) + ": need at least 2 solutions, got " +
                                std::to_string(solutions.size()));
  }
  const std::size_t n = solutions.front().x.size();
  for (const auto& s : solutions) {
    if (s.x.size() != n) throw DimensionMismatch(std::string(who) + ": ragged decision vectors");
    if (!std::isfinite(s.f)) throw std::domain_error(std::string(who) + ": non-finite objective");
  }
}

}  // namespace

CategoryAssignment assign_categories(std::span<const EvaluatedSolution> solutions, double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("assign_categories: t must lie in (0, 1)");
  const std::size_t alpha = solutions.size();
  std::size_t n_good = static_cast<std::size_t>(std::llround(t * static_cast<double>(alpha)));
  n_good = std::max<std::size_t>(n_good, 1);
  if (n_good >= alpha) {
    throw std::invalid_argument("assign_categories: t=" + std::to_string(t) + " with " +
                                std::to_string(alpha) + " solutions leaves no bad solution");
  }
  std::vector<std::size_t> order(alpha);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return solutions[a].f < solutions[b].f; });
  CategoryAssignment cat;
  cat.good.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_good));
  cat.bad.assign(order.begin() + static_cast<std::ptrdiff_t>(n_good), order.end());
  std::sort(cat.good.begin(), cat.good.end());
  std::sort(cat.bad.begin(), cat.bad.end());
  return cat;
}

RelationDataset build_c1(std::span<const EvaluatedSolution> solutions) {
  check_sources(solutions, "build_c1");
  RelationDataset ds;
  ds.criterion = Criterion::C1;
  ds.solutions = vectors_of(solutions);
  const std::size_t alpha = solutions.size();
  ds.pairs.reserve(alpha * (alpha - 1));
  for (std::size_t i = 0; i < alpha; ++i) {
    for (std::size_t j = 0; j < alpha; ++j) {
      if (i == j) continue;
      const bool better = solutions[i].f < solutions[j].f;
      ds.pairs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          better ? 1 : -1, better ? Provenance::Plus1 : Provenance::Minus1});
    }
  }
  return ds;
}

C2Build build_c2(std::span<const EvaluatedSolution> solutions, double t) {
  check_sources(solutions, "build_c2");
  C2Build out;
  out.categories = assign_categories(solutions, t);
  const std::size_t alpha = solutions.size();
  std::vector<bool> good(alpha, false);
  for (std::size_t i : out.categories.good) good[i] = true;

  RelationDataset& ds = out.dataset;
  ds.criterion = Criterion::C2;
  ds.threshold_t = t;
  ds.solutions = vectors_of(solutions);
  ds.pairs.reserve(alpha * (alpha - 1));
  for (std::size_t i = 0; i < alpha; ++i) {
    for (std::size_t j = 0; j < alpha; ++j) {
      if (i == j) continue;
      Provenance p;
      if (good[i]) {
        p = good[j] ? Provenance::Plus0 : Provenance::Plus1;
      } else {
        p = good[j] ? Provenance::Minus1 : Provenance::Minus0;
      }
      ds.pairs.push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), label_of(p), p});
    }
  }
  return out;
}

RelationDataset balance_labels(const RelationDataset& dataset, RngStream& rng) {
  std::vector<std::size_t> plus0;
  std::vector<std::size_t> minus0;
  std::size_t theta = 0;
  for (std::size_t k = 0; k < dataset.pairs.size(); ++k) {
    switch (dataset.pairs[k].provenance) {
      case Provenance::Plus1:
        ++theta;
        break;
      case Provenance::Plus0:
        plus0.push_back(k);
        break;
      case Provenance::Minus0:
        minus0.push_back(k);
        break;
      case Provenance::Minus1:
        break;
    }
  }

  const std::size_t p0 = plus0.size();
  const std::size_t m0 = minus0.size();
  std::size_t keep_plus0 = p0;
  std::size_t keep_minus0 = m0;
  if (p0 + m0 > theta) {
    const std::size_t half_hi = (theta + 1) / 2;
    const std::size_t half_lo = theta / 2;
    if (p0 >= half_hi && m0 >= half_lo) {
      keep_plus0 = half_hi;
      keep_minus0 = half_lo;
    } else if (p0 < half_hi) {
      keep_minus0 = theta - p0;
    } else {
      keep_plus0 = theta - m0;
    }
  }

  std::vector<bool> keep(dataset.pairs.size(), true);
  auto thin = [&](const std::vector<std::size_t>& group, std::size_t k) {
    if (k >= group.size()) return;
    for (std::size_t idx : group) keep[idx] = false;
    for (std::size_t pick : rng.sample_without_replacement(group.size(), k)) keep[group[pick]] = true;
  };
  thin(plus0, keep_plus0);
  thin(minus0, keep_minus0);

  RelationDataset out;
  out.criterion = dataset.criterion;
  out.threshold_t = dataset.threshold_t;
  out.solutions = dataset.solutions;
  out.pairs.reserve(2 * theta + keep_plus0 + keep_minus0);
  for (std::size_t k = 0; k < dataset.pairs.size(); ++k) {
    if (keep[k]) out.pairs.push_back(dataset.pairs[k]);
  }
  return out;
}

}  // namespace drso
