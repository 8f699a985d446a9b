#include <gtest/gtest.h>

#include <cmath>

#include "drso/problems.hpp"

using namespace drso;

namespace {

std::vector<double> probe5() { return {-0.2, -0.1, 0.0, 0.1, 0.2}; }

}  // namespace

TEST(Problems, KnownOptimaEvaluateToTheirRecordedValue) {
  for (std::size_t n : {2u, 20u, 50u}) {
    for (const auto& name : problem_names()) {
      const Problem p = make_problem(name, n);
      ASSERT_TRUE(p.known_optimizer().has_value()) << name;
      ASSERT_TRUE(p.known_optimum_value().has_value()) << name;
      EXPECT_NEAR(p.evaluate(*p.known_optimizer()), *p.known_optimum_value(), 1e-9) << name;
      EXPECT_TRUE(p.bounds().contains(*p.known_optimizer())) << name;
    }
  }
}

TEST(Problems, ZeroOptimaAtOriginOrOnes) {
  EXPECT_EQ(make_problem("ellipsoid", 20).evaluate(std::vector<double>(20, 0.0)), 0.0);
  EXPECT_EQ(make_problem("rosenbrock", 20).evaluate(std::vector<double>(20, 1.0)), 0.0);
  EXPECT_EQ(make_problem("yllf05", 20).evaluate(std::vector<double>(20, 1.0)), 0.0);
  EXPECT_EQ(make_problem("yllf06", 20).evaluate(std::vector<double>(20, 0.4)), 0.0);
  EXPECT_NEAR(make_problem("ackley", 2).evaluate(std::vector<double>(2, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(make_problem("yllf13", 20).evaluate(std::vector<double>(20, 1.0)), 0.0, 1e-12);
  EXPECT_NEAR(make_problem("yllf12", 20).evaluate(std::vector<double>(20, -1.0)), 0.0, 1e-12);
}

TEST(Problems, SchwefelOptimumMatchesDeskConstant) {
  for (std::size_t n : {20u, 50u}) {
    const Problem p = make_problem("yllf08", n);
    EXPECT_NEAR(*p.known_optimum_value(), -418.9829 * static_cast<double>(n), 1e-4 * static_cast<double>(n));
  }
}

// Reference values from an independent NumPy implementation at x = (-0.2, -0.1, 0, 0.1, 0.2).
TEST(Problems, ValuesMatchReferenceImplementation) {
  const struct {
    const char* name;
    double value;
  } cases[] = {
      {"ellipsoid", 0.30000000000000004}, {"rosenbrock", 11.04},
      {"ackley", 1.3658313610976838},     {"griewank", 0.02753231472639106},
      {"yllf01", 0.1},                    {"yllf02", 0.6000000000000001},
      {"yllf03", 0.2599999999999998},     {"yllf04", 0.2},
      {"yllf05", 11.04},                  {"yllf06", 0.0},
      {"yllf09", 17.739320225002103},     {"yllf10", 1.3658313610976838},
      {"yllf11", 0.02753231472639106},    {"yllf12", 3.174177853541999},
      {"yllf13", 0.8913046551246748},
  };
  for (const auto& c : cases) {
    const Problem p = make_problem(c.name, 5);
    EXPECT_NEAR(p.evaluate(probe5()), c.value, 1e-12 * (1.0 + std::abs(c.value))) << c.name;
  }
  EXPECT_NEAR(make_problem("yllf07", 5).evaluate(probe5()), 0.0102, 1e-15);
  EXPECT_NEAR(make_problem("yllf08", 5).evaluate(std::vector<double>{100, -250, 420.968746227503, 7, 0}),
              -393.7213656539859, 1e-9);
}

TEST(Problems, PenaltyTermActsOutsideTheBand) {
  // Both coordinates sit beyond a = 10, so u() dominates.
  EXPECT_NEAR(make_problem("yllf12", 2).evaluate(std::vector<double>{60.0, -55.0}), 1035066812.5231404, 1e-3);
}

TEST(Problems, NoisyQuarticAddsUnitIntervalNoise) {
  const Problem p = make_problem("yllf07", 5);
  EXPECT_TRUE(p.noisy());
  RngStream rng(4);
  const double clean = p.evaluate(probe5());
  for (int i = 0; i < 1000; ++i) {
    const double noisy = p.evaluate(probe5(), rng);
    ASSERT_GE(noisy - clean, 0.0);
    ASSERT_LT(noisy - clean, 1.0);
  }
  // Noise-free path is deterministic and minimized at 0.
  EXPECT_EQ(p.evaluate(std::vector<double>(5, 0.0)), 0.0);
  const Problem q = make_problem("ellipsoid", 5);
  RngStream r2(4);
  EXPECT_EQ(q.evaluate(probe5(), r2), q.evaluate(probe5()));
  EXPECT_EQ(r2.draws(), 0u);
}

TEST(Problems, RejectsUnknownNamesAndSmallDimensions) {
  EXPECT_THROW(make_problem("sphere", 20), std::invalid_argument);
  EXPECT_THROW(make_problem("ellipsoid", 1), std::invalid_argument);
  const Problem p = make_problem("ellipsoid", 3);
  EXPECT_THROW(p.evaluate(std::vector<double>(4, 0.0)), DimensionMismatch);
}

TEST(Problems, RegistryHasSeventeenInstancesPerDimension) {
  for (std::size_t n : {20u, 50u}) {
    const auto specs = suite_registry(n);
    ASSERT_EQ(specs.size(), 17u);
    for (const auto& s : specs) {
      EXPECT_EQ(s.dim, n);
      EXPECT_EQ(s.bounds.dim(), n);
    }
  }
  EXPECT_EQ(lzg_names(), (std::vector<std::string>{"ellipsoid", "rosenbrock", "ackley", "griewank"}));
}

TEST(Problems, DomainsFollowTheStandardDefinitions) {
  const struct {
    const char* name;
    double lo, hi;
  } cases[] = {{"ellipsoid", -5.12, 5.12}, {"rosenbrock", -2.048, 2.048}, {"ackley", -32.768, 32.768},
               {"griewank", -600, 600},    {"yllf01", -100, 100},         {"yllf02", -10, 10},
               {"yllf05", -30, 30},        {"yllf07", -1.28, 1.28},       {"yllf08", -500, 500},
               {"yllf10", -32, 32},        {"yllf12", -50, 50},           {"yllf13", -50, 50}};
  for (const auto& c : cases) {
    const auto b = make_problem(c.name, 4).bounds();
    EXPECT_EQ(b.lower(0), c.lo) << c.name;
    EXPECT_EQ(b.upper(3), c.hi) << c.name;
  }
}

TEST(Problems, FiniteEverywhereAndUnimodalOptimaNeverBeaten) {
  RngStream rng(2024);
  for (const auto& name : problem_names()) {
    const Problem p = make_problem(name, 20);
    const double best = *p.known_optimum_value();
    const bool unimodal = name == "ellipsoid" || name == "yllf01" || name == "yllf02" || name == "yllf03" ||
                          name == "yllf04";
    for (int i = 0; i < 2000; ++i) {
      std::vector<double> x(20);
      for (std::size_t j = 0; j < 20; ++j) x[j] = rng.uniform(p.bounds().lower(j), p.bounds().upper(j));
      const double f = p.evaluate(x);
      ASSERT_TRUE(std::isfinite(f)) << name;
      if (unimodal) ASSERT_GT(f, best) << name;
    }
  }
}

TEST(Problems, EvaluateAndRecordCountsAndRespectsBudget) {
  const Problem p = make_problem("yllf01", 4);
  Archive a(2);
  RngStream rng(1);
  const auto s = evaluate_and_record(p, std::vector<double>(4, 0.0), a, rng);
  EXPECT_EQ(s.f, 0.0);
  EXPECT_EQ(a.fes(), 1u);
  EXPECT_THROW(evaluate_and_record(p, std::vector<double>(3, 0.0), a, rng), DimensionMismatch);
  EXPECT_EQ(a.fes(), 1u);
  evaluate_and_record(p, std::vector<double>(4, 1.0), a, rng);
  EXPECT_THROW(evaluate_and_record(p, std::vector<double>(4, 0.0), a, rng), BudgetExhausted);
  EXPECT_EQ(a.fes(), 2u);
}
