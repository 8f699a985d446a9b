#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "drso/sampling.hpp"

using namespace drso;

namespace {

// Each dimension must put exactly one point in each of the `count` strata.
void expect_stratified(const std::vector<DecisionVector>& pts, const Bounds& b) {
  const std::size_t count = pts.size();
  for (std::size_t j = 0; j < b.dim(); ++j) {
    std::set<std::size_t> seen;
    for (const auto& p : pts) {
      ASSERT_GE(p[j], b.lower(j));
      ASSERT_LE(p[j], b.upper(j));
      const double s = (p[j] - b.lower(j)) / b.width(j) * static_cast<double>(count);
      seen.insert(std::min(count - 1, static_cast<std::size_t>(std::floor(s))));
    }
    EXPECT_EQ(seen.size(), count) << "dimension " << j;
  }
}

}  // namespace

TEST(Lhs, FourPointsInTwoDimensions) {
  const Bounds b = Bounds::uniform(2, 0.0, 1.0);
  RngStream rng(1);
  const auto pts = lhs_sample(b, 4, rng);
  ASSERT_EQ(pts.size(), 4u);
  expect_stratified(pts, b);
}

TEST(Lhs, StratifiedInTwentyDimensionsOnAsymmetricBox) {
  std::vector<double> lo(20), hi(20);
  for (std::size_t j = 0; j < 20; ++j) {
    lo[j] = -5.0 - static_cast<double>(j);
    hi[j] = 3.0 + 0.5 * static_cast<double>(j);
  }
  const Bounds b(lo, hi);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed);
    const auto pts = lhs_sample(b, 30, rng);
    ASSERT_EQ(pts.size(), 30u);
    for (const auto& p : pts) ASSERT_EQ(p.size(), 20u);
    expect_stratified(pts, b);
  }
}

TEST(Lhs, SinglePointIsUniformInBox) {
  const Bounds b = Bounds::uniform(3, -1.0, 1.0);
  RngStream rng(3);
  const auto pts = lhs_sample(b, 1, rng);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_TRUE(b.contains(pts[0]));
  EXPECT_THROW(lhs_sample(b, 0, rng), std::invalid_argument);
}

TEST(Lhs, Deterministic) {
  const Bounds b = Bounds::uniform(5, -2.0, 2.0);
  RngStream a(77), c(77), d(78);
  const auto pa = lhs_sample(b, 10, a);
  EXPECT_EQ(pa, lhs_sample(b, 10, c));
  EXPECT_NE(pa, lhs_sample(b, 10, d));
}
