#include "drso/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace drso {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
// Per-coordinate minimizer of -x sin(sqrt|x|) on [-500, 500].
constexpr double kSchwefelArgmin = 420.968746227503;

double ellipsoid(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 1) * x[i] * x[i];
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double ackley(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * kPi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + kE;
}

double griewank(std::span<const double> x) {
  double sq = 0.0;
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return 1.0 + sq / 4000.0 - prod;
}

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double schwefel_222(std::span<const double> x) {
  double s = 0.0;
  double p = 1.0;
  for (double v : x) {
    s += std::abs(v);
    p *= std::abs(v);
  }
  return s + p;
}

double schwefel_12(std::span<const double> x) {
  double s = 0.0;
  double prefix = 0.0;
  for (double v : x) {
    prefix += v;
    s += prefix * prefix;
  }
  return s;
}

double schwefel_221(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double step(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) {
    const double k = std::floor(v + 0.5);
    s += k * k;
  }
  return s;
}

double quartic(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v2 = x[i] * x[i];
    s += static_cast<double>(i + 1) * v2 * v2;
  }
  return s;
}

double schwefel_226(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s -= v * std::sin(std::sqrt(std::abs(v)));
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v) + 10.0;
  return s;
}

double penalty_u(double x, double a, double k, double m) {
  if (x > a) return k * std::pow(x - a, m);
  if (x < -a) return k * std::pow(-x - a, m);
  return 0.0;
}

double penalized_1(std::span<const double> x) {
  const std::size_t n = x.size();
  auto y = [&](std::size_t i) { return 1.0 + (x[i] + 1.0) / 4.0; };
  const double s0 = std::sin(kPi * y(0));
  double s = 10.0 * s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sin(kPi * y(i + 1));
    const double d = y(i) - 1.0;
    s += d * d * (1.0 + 10.0 * si * si);
  }
  const double dn = y(n - 1) - 1.0;
  s += dn * dn;
  double pen = 0.0;
  for (double v : x) pen += penalty_u(v, 10.0, 100.0, 4.0);
  return kPi / static_cast<double>(n) * s + pen;
}

double penalized_2(std::span<const double> x) {
  const std::size_t n = x.size();
  const double s0 = std::sin(3.0 * kPi * x[0]);
  double s = s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sin(3.0 * kPi * x[i + 1]);
    const double d = x[i] - 1.0;
    s += d * d * (1.0 + si * si);
  }
  const double sn = std::sin(2.0 * kPi * x[n - 1]);
  const double dn = x[n - 1] - 1.0;
  s += dn * dn * (1.0 + sn * sn);
  double pen = 0.0;
  for (double v : x) pen += penalty_u(v, 5.0, 100.0, 4.0);
  return 0.1 * s + pen;
}

struct Entry {
  const char* name;
  double lower;
  double upper;
  double (*fn)(std::span<const double>);
  double optimizer_coord;
  bool noisy;
};

// clang-format off
constexpr Entry kEntries[] = {
    {"ellipsoid",  -5.12,   5.12,   ellipsoid,    0.0, false},
    {"rosenbrock", -2.048,  2.048,  rosenbrock,   1.0, false},
    {"ackley",     -32.768, 32.768, ackley,       0.0, false},
    {"griewank",   -600.0,  600.0,  griewank,     0.0, false},
    {"yllf01",     -100.0,  100.0,  sphere,       0.0, false},
    {"yllf02",     -10.0,   10.0,   schwefel_222, 0.0, false},
    {"yllf03",     -100.0,  100.0,  schwefel_12,  0.0, false},
    {"yllf04",     -100.0,  100.0,  schwefel_221, 0.0, false},
    {"yllf05",     -30.0,   30.0,   rosenbrock,   1.0, false},
    {"yllf06",     -100.0,  100.0,  step,         0.0, false},
    {"yllf07",     -1.28,   1.28,   quartic,      0.0, true},
    {"yllf08",     -500.0,  500.0,  schwefel_226, kSchwefelArgmin, false},
    {"yllf09",     -5.12,   5.12,   rastrigin,    0.0, false},
    {"yllf10",     -32.0,   32.0,   ackley,       0.0, false},
    {"yllf11",     -600.0,  600.0,  griewank,     0.0, false},
    {"yllf12",     -50.0,   50.0,   penalized_1, -1.0, false},
    {"yllf13",     -50.0,   50.0,   penalized_2,  1.0, false},
};
// clang-format on

const Entry* find_entry(const std::string& name) {
  for (const auto& e : kEntries) {
    if (name == e.name) return &e;
  }
  return nullptr;
}

}  // namespace

Problem::Problem(std::string name, Bounds bounds, Objective objective, bool noisy,
                 std::optional<DecisionVector> optimizer)
    : name_(std::move(name)),
      bounds_(std::move(bounds)),
      objective_(std::move(objective)),
      noisy_(noisy),
      optimizer_(std::move(optimizer)) {
  if (optimizer_) optimum_value_ = objective_(*optimizer_);
}

double Problem::evaluate(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch(name_ + ": expected " + std::to_string(dim()) + " coordinates, got " +
                            std::to_string(x.size()));
  }
  return objective_(x);
}

double Problem::evaluate(std::span<const double> x, RngStream& rng) const {
  double f = evaluate(x);
  if (noisy_) f += rng.uniform();
  return f;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kEntries) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

const std::vector<std::string>& lzg_names() {
  static const std::vector<std::string> names{"ellipsoid", "rosenbrock", "ackley", "griewank"};
  return names;
}

Problem make_problem(const std::string& name, std::size_t n) {
  const Entry* e = find_entry(name);
  if (e == nullptr) throw std::invalid_argument("unknown problem '" + name + "'");
  if (n < 2) {
    throw std::invalid_argument("problem '" + name + "': dimension must be at least 2, got " +
                                std::to_string(n));
  }
  return Problem(e->name, Bounds::uniform(n, e->lower, e->upper), e->fn, e->noisy,
                 DecisionVector(n, e->optimizer_coord));
}

std::vector<ProblemSpec> suite_registry(std::size_t dim) {
  std::vector<ProblemSpec> specs;
  for (const auto& name : problem_names()) {
    Problem p = make_problem(name, dim);
    specs.push_back({p.name(), p.dim(), p.bounds(), p.known_optimum_value()});
  }
  return specs;
}

EvaluatedSolution evaluate_and_record(const Problem& problem, const DecisionVector& x,
                                      Archive& archive, RngStream& rng) {
  if (archive.exhausted()) {
    throw BudgetExhausted("evaluate_and_record: budget of " + std::to_string(archive.fe_max()) +
                          " evaluations exhausted");
  }
  EvaluatedSolution sol{x, problem.evaluate(x, rng)};
  if (!std::isfinite(sol.f)) {
    throw std::domain_error(problem.name() + ": non-finite objective value");
  }
  archive.insert(sol);
  return sol;
}

}  // namespace drso
