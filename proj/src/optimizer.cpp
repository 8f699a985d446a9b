#include "drso/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "drso/sampling.hpp"
#include "drso/surrogate.hpp"

namespace drso {

namespace {

struct VariantName {
  Variant variant;
  const char* name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::Full, "full"},
    {Variant::Sel1RandomPu, "sel1-random-pu"},
    {Variant::Sel2RandomQbest, "sel2-random-qbest"},
    {Variant::Gen1NoPu, "gen1-no-pu"},
    {Variant::Gen2NoLocalSearch, "gen2-no-localsearch"},
    {Variant::ModRegressionClassification, "mod-regression-classification"},
};

}  // namespace

const char* variant_name(Variant v) {
  for (const auto& e : kVariantNames) {
    if (e.variant == v) return e.name;
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (const auto& e : kVariantNames) {
    if (name == e.name) return e.variant;
  }
  throw std::invalid_argument("unknown variant '" + name + "'");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = [] {
    std::vector<Variant> out;
    for (const auto& e : kVariantNames) out.push_back(e.variant);
    return out;
  }();
  return v;
}

void AlgoConfig::validate() const {
  if (population_size < 3) throw std::invalid_argument("population_size must be at least 3");
  if (fe_max < population_size) throw std::invalid_argument("fe_max must be at least population_size");
  if (alpha < 2) throw std::invalid_argument("alpha must be at least 2");
  if (alpha > fe_max) throw std::invalid_argument("alpha must not exceed fe_max");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0, 1)");
  reproduction.validate();
  fitness_model.validate();
  category_model.validate();
  regressor.validate();
  classifier.validate();
}

double RunTrace::final_best() const {
  if (records.empty()) throw std::logic_error("RunTrace: no records");
  return records.back().best_so_far;
}

namespace {

void record(RunTrace& trace, const EvaluatedSolution& sol, std::size_t fes) {
  const double prev = trace.records.empty() ? sol.f : trace.records.back().best_so_far;
  trace.records.push_back({fes, sol.f, std::min(prev, sol.f)});
}

std::vector<DecisionVector> random_subset(const std::vector<DecisionVector>& q,
                                          std::optional<std::size_t> exclude, std::size_t k,
                                          RngStream& rng) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!exclude || *exclude != i) pool.push_back(i);
  }
  k = std::min(k, pool.size());
  auto picks = rng.sample_without_replacement(pool.size(), k);
  std::sort(picks.begin(), picks.end());
  std::vector<DecisionVector> out;
  for (std::size_t p : picks) out.push_back(q[pool[p]]);
  return out;
}

}  // namespace

RunTrace run_drso(const Problem& problem, const AlgoConfig& config, std::uint64_t seed) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n_pop = config.population_size;

  RngStream master(seed);
  RngStream init_rng = master.fork();
  RngStream repro_rng = master.fork();
  RngStream model_rng = master.fork();
  RngStream select_rng = master.fork();
  RngStream noise_rng = master.fork();

  RunTrace trace;
  trace.problem = problem.name();
  trace.algorithm = variant_name(config.variant);
  trace.seed = seed;
  trace.config = config;
  trace.records.reserve(config.fe_max);

  Archive archive(config.fe_max);
  for (const auto& x : lhs_sample(problem.bounds(), n_pop, init_rng)) {
    const auto sol = evaluate_and_record(problem, x, archive, noise_rng);
    record(trace, sol, archive.fes());
  }

  ReproductionConfig repro = config.reproduction;
  if (config.variant == Variant::Gen2NoLocalSearch) repro.local_ratio = 0.0;
  const auto pu_random_size =
      static_cast<std::size_t>(std::llround(config.t * static_cast<double>(n_pop)));

  std::vector<EvaluatedSolution> p_e = archive.top(n_pop);
  std::vector<DecisionVector> p_u;
  while (!archive.exhausted()) {
    const std::vector<DecisionVector> q =
        reproduce(p_e, p_u, n_pop, problem.bounds(), repro, repro_rng);
    const std::vector<EvaluatedSolution> training =
        archive.top(std::min(config.alpha, archive.size()));

    std::size_t best = 0;
    switch (config.variant) {
      case Variant::Full:
      case Variant::Gen2NoLocalSearch: {
        const auto s = train_relation_surrogate(training, config.t, config.fitness_model,
                                                config.category_model, model_rng);
        best = select_best(q, s).first;
        p_u = select_unevaluated(q, s, best);
        break;
      }
      case Variant::Gen1NoPu: {
        const auto s = train_relation_surrogate(training, config.t, config.fitness_model,
                                                config.category_model, model_rng, true, false);
        best = select_best(q, s).first;
        p_u.clear();
        break;
      }
      case Variant::Sel1RandomPu: {
        const auto s = train_relation_surrogate(training, config.t, config.fitness_model,
                                                config.category_model, model_rng, true, false);
        best = select_best(q, s).first;
        p_u = random_subset(q, best, pu_random_size, select_rng);
        break;
      }
      case Variant::Sel2RandomQbest: {
        const auto s = train_relation_surrogate(training, config.t, config.fitness_model,
                                                config.category_model, model_rng, false, true);
        best = static_cast<std::size_t>(select_rng.below(q.size()));
        p_u = select_unevaluated(q, s, best);
        break;
      }
      case Variant::ModRegressionClassification: {
        const auto reg = train_fitness_regressor(training, config.regressor, model_rng);
        const auto cls = train_category_classifier(training, config.t, config.classifier, model_rng);
        best = baseline_select(q, reg, BaselineMode::Regression).best;
        p_u.clear();
        for (std::size_t i : baseline_select(q, cls, BaselineMode::Classification).positive) {
          if (i != best) p_u.push_back(q[i]);
        }
        break;
      }
    }

    const auto sol = evaluate_and_record(problem, q[best], archive, noise_rng);
    record(trace, sol, archive.fes());
    p_e = archive.top(n_pop);
  }

  trace.archive = archive.entries();
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

const char* selection_mode_name(SelectionMode m) {
  return m == SelectionMode::SelectN ? "select-N" : "select-1";
}

RunTrace run_plain_eda(const Problem& problem, SelectionMode mode, std::size_t generations,
                       std::size_t population_size, std::uint64_t seed,
                       const ReproductionConfig& reproduction) {
  if (generations < 1) throw std::invalid_argument("run_plain_eda: generations must be positive");
  if (population_size < 3) throw std::invalid_argument("run_plain_eda: population_size must be >= 3");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t per_gen = mode == SelectionMode::SelectN ? population_size : 1;
  const std::size_t fe_max = population_size + generations * per_gen;

  RngStream master(seed);
  RngStream init_rng = master.fork();
  RngStream repro_rng = master.fork();
  RngStream select_rng = master.fork();
  RngStream noise_rng = master.fork();

  RunTrace trace;
  trace.problem = problem.name();
  trace.algorithm = std::string("eda-") + selection_mode_name(mode);
  trace.seed = seed;
  trace.config.population_size = population_size;
  trace.config.fe_max = fe_max;
  trace.config.alpha = std::min(trace.config.alpha, fe_max);
  trace.config.reproduction = reproduction;
  trace.records.reserve(fe_max);

  Archive archive(fe_max);
  for (const auto& x : lhs_sample(problem.bounds(), population_size, init_rng)) {
    const auto sol = evaluate_and_record(problem, x, archive, noise_rng);
    record(trace, sol, archive.fes());
  }
  // With every solution archived, the N best of parents and offspring are the archive head.
  std::vector<EvaluatedSolution> parents = archive.top(population_size);
  for (std::size_t g = 0; g < generations; ++g) {
    const auto q = reproduce(parents, {}, population_size, problem.bounds(), reproduction, repro_rng);
    if (mode == SelectionMode::SelectN) {
      for (const auto& x : q) {
        const auto sol = evaluate_and_record(problem, x, archive, noise_rng);
        record(trace, sol, archive.fes());
      }
    } else {
      const auto pick = static_cast<std::size_t>(select_rng.below(q.size()));
      const auto sol = evaluate_and_record(problem, q[pick], archive, noise_rng);
      record(trace, sol, archive.fes());
    }
    parents = archive.top(population_size);
  }

  trace.archive = archive.entries();
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

}  // namespace drso
