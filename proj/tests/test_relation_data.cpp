#include <gtest/gtest.h>

#include <map>
#include <set>

#include "drso/relation_data.hpp"

using namespace drso;

namespace {

std::vector<EvaluatedSolution> ramp(std::size_t alpha, std::size_t dim = 3) {
  std::vector<EvaluatedSolution> out;
  for (std::size_t i = 0; i < alpha; ++i) {
    // Shuffled fitness so input order is not sorted order.
    const double f = static_cast<double>((i * 7) % alpha);
    out.push_back({DecisionVector(dim, static_cast<double>(i)), f});
  }
  return out;
}

struct Counts {
  std::size_t plus1, minus1, plus0, minus0;
};

Counts counts(const RelationDataset& d) {
  return {d.count(Provenance::Plus1), d.count(Provenance::Minus1), d.count(Provenance::Plus0),
          d.count(Provenance::Minus0)};
}

}  // namespace

TEST(BuildC1, FiftySolutionsGiveBalancedPairs) {
  const auto sols = ramp(50);
  const auto ds = build_c1(sols);
  EXPECT_EQ(ds.size(), 2450u);
  const auto c = counts(ds);
  EXPECT_EQ(c.plus1, 1225u);
  EXPECT_EQ(c.minus1, 1225u);
  EXPECT_EQ(ds.source_count(), 50u);
  EXPECT_EQ(ds.dim(), 3u);
}

TEST(BuildC1, LabelsAreAntisymmetricAndMatchFitness) {
  const auto sols = ramp(13);
  const auto ds = build_c1(sols);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> lab;
  for (const auto& p : ds.pairs) {
    EXPECT_NE(p.first, p.second);
    EXPECT_EQ(p.label, sols[p.first].f < sols[p.second].f ? 1 : -1);
    lab[{p.first, p.second}] = p.label;
  }
  for (const auto& [k, v] : lab) EXPECT_EQ(lab.at({k.second, k.first}), -v);
}

TEST(BuildC1, TiedFitnessIsMinusBothWays) {
  const std::vector<EvaluatedSolution> sols{{{0.0}, 1.0}, {{1.0}, 1.0}, {{2.0}, 0.0}};
  const auto ds = build_c1(sols);
  ASSERT_EQ(ds.size(), 6u);
  for (const auto& p : ds.pairs) {
    if (p.first < 2 && p.second < 2) EXPECT_EQ(p.label, -1);
  }
  const auto c = counts(ds);
  EXPECT_EQ(c.plus1, 2u);
  EXPECT_EQ(c.minus1, 4u);
}

TEST(BuildC1, FeatureConcatenatesOrderedPair) {
  const std::vector<EvaluatedSolution> sols{{{1.0, 2.0}, 3.0}, {{4.0, 5.0}, 1.0}, {{7.0, 8.0}, 2.0}};
  const auto ds = build_c1(sols);
  ASSERT_EQ(ds.size(), 6u);
  const auto& p = ds.pairs[0];
  EXPECT_EQ(ds.feature(0), (DecisionVector{sols[p.first].x[0], sols[p.first].x[1], sols[p.second].x[0],
                                           sols[p.second].x[1]}));
  EXPECT_EQ(ds.labels().size(), 6u);
}

TEST(BuildC1, RejectsDegenerateInput) {
  const std::vector<EvaluatedSolution> one{{{0.0}, 1.0}};
  EXPECT_THROW(build_c1(one), std::invalid_argument);
  const std::vector<EvaluatedSolution> ragged{{{0.0}, 1.0}, {{0.0, 1.0}, 2.0}};
  EXPECT_THROW(build_c1(ragged), DimensionMismatch);
}

TEST(AssignCategories, BestRoundedFractionIsGood) {
  const auto sols = ramp(10);
  const auto cat = assign_categories(sols, 0.1);
  ASSERT_EQ(cat.good.size(), 1u);
  EXPECT_EQ(sols[cat.good[0]].f, 0.0);
  EXPECT_EQ(cat.bad.size(), 9u);
  const auto half = assign_categories(sols, 0.5);
  EXPECT_EQ(half.good.size(), 5u);
  for (auto g : half.good) EXPECT_LT(sols[g].f, 5.0);
  EXPECT_THROW(assign_categories(sols, 0.0), std::invalid_argument);
  EXPECT_THROW(assign_categories(sols, 0.97), std::invalid_argument);
}

TEST(BuildC2, FourSolutionsHalfGood) {
  const auto sols = ramp(4);
  const auto c2 = build_c2(sols, 0.5);
  const auto c = counts(c2.dataset);
  EXPECT_EQ(c.plus1, 4u);
  EXPECT_EQ(c.minus1, 4u);
  EXPECT_EQ(c.plus0, 2u);
  EXPECT_EQ(c.minus0, 2u);
  for (const auto& p : c2.dataset.pairs) EXPECT_EQ(p.label, label_of(p.provenance));
  RngStream rng(1);
  const auto bal = balance_labels(c2.dataset, rng);
  // Zeros do not exceed theta = 4, so nothing is dropped.
  EXPECT_EQ(bal.size(), 12u);
}

TEST(BuildC2, FiftySolutionsBalanceTo625Each) {
  const auto sols = ramp(50);
  const auto c2 = build_c2(sols, 0.5);
  auto c = counts(c2.dataset);
  EXPECT_EQ(c.plus1, 625u);
  EXPECT_EQ(c.minus1, 625u);
  EXPECT_EQ(c.plus0, 600u);
  EXPECT_EQ(c.minus0, 600u);
  RngStream rng(5);
  const auto bal = balance_labels(c2.dataset, rng);
  c = counts(bal);
  EXPECT_EQ(c.plus1, 625u);
  EXPECT_EQ(c.minus1, 625u);
  EXPECT_EQ(c.plus0, 313u);
  EXPECT_EQ(c.minus0, 312u);
  EXPECT_EQ(bal.size(), 1875u);
  EXPECT_EQ(bal.threshold_t, 0.5);
}

TEST(BuildC2, TenPercentThreshold) {
  const auto sols = ramp(50);
  const auto c2 = build_c2(sols, 0.1);
  const auto c = counts(c2.dataset);
  EXPECT_EQ(c2.categories.good.size(), 5u);
  EXPECT_EQ(c.plus1, 5u * 45u);
  EXPECT_EQ(c.minus1, 45u * 5u);
  EXPECT_EQ(c.plus0, 20u);
  EXPECT_EQ(c.minus0, 45u * 44u);
  RngStream rng(2);
  const auto bal = balance_labels(c2.dataset, rng);
  const auto b = counts(bal);
  // Too few plus0 pairs: keep them all and top up from minus0.
  EXPECT_EQ(b.plus0, 20u);
  EXPECT_EQ(b.minus0, 225u - 20u);
}

TEST(BalanceLabels, ShortMinusZeroSideIsTakenWhole) {
  // Six good, one bad: plus1 = 6, plus0 = 30, minus0 = 0.
  std::vector<EvaluatedSolution> sols;
  for (int i = 0; i < 7; ++i) sols.push_back({{static_cast<double>(i)}, static_cast<double>(i)});
  const auto c2 = build_c2(sols, 6.0 / 7.0);
  RngStream rng(3);
  const auto b = counts(balance_labels(c2.dataset, rng));
  EXPECT_EQ(b.plus1, 6u);
  EXPECT_EQ(b.plus0, 6u);
  EXPECT_EQ(b.minus0, 0u);
}

TEST(BalanceLabels, TwoGoodThreeBad) {
  std::vector<EvaluatedSolution> sols;
  for (int i = 0; i < 5; ++i) sols.push_back({{static_cast<double>(i)}, static_cast<double>(i)});
  const auto c2 = build_c2(sols, 0.4);
  auto c = counts(c2.dataset);
  EXPECT_EQ(c.plus1, 6u);
  EXPECT_EQ(c.plus0, 2u);
  EXPECT_EQ(c.minus0, 6u);
  RngStream rng(3);
  c = counts(balance_labels(c2.dataset, rng));
  EXPECT_EQ(c.plus0, 2u);
  EXPECT_EQ(c.minus0, 4u);
}

TEST(BalanceLabels, SamplesWithoutReplacementAndDeterministically) {
  const auto c2 = build_c2(ramp(30), 0.5);
  RngStream a(9), b(9);
  const auto x = balance_labels(c2.dataset, a);
  const auto y = balance_labels(c2.dataset, b);
  ASSERT_EQ(x.size(), y.size());
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t k = 0; k < x.size(); ++k) {
    EXPECT_EQ(x.pairs[k].first, y.pairs[k].first);
    EXPECT_EQ(x.pairs[k].second, y.pairs[k].second);
    EXPECT_TRUE(seen.insert({x.pairs[k].first, x.pairs[k].second}).second);
  }
}
