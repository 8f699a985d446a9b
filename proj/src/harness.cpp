#include "drso/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "drso/problems.hpp"
#include "drso/relation_data.hpp"
#include "drso/sampling.hpp"
#include "drso/surrogate.hpp"

namespace drso::harness {

using json = nlohmann::json;

std::string ProblemEntry::key() const { return fmt::format("{}-{}d", name, dim); }

namespace {

struct SurrogateName {
  SurrogateKind kind;
  const char* name;
};

constexpr SurrogateName kSurrogateNames[] = {
    {SurrogateKind::RC1, "R-C1"},           {SurrogateKind::RC2, "R-C2"},
    {SurrogateKind::Regressor, "regressor"}, {SurrogateKind::Classifier, "classifier"},
    {SurrogateKind::Random, "random"},       {SurrogateKind::Oracle, "oracle"},
};

}  // namespace

const char* surrogate_name(SurrogateKind k) {
  for (const auto& e : kSurrogateNames) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

SurrogateKind parse_surrogate(const std::string& name) {
  for (const auto& e : kSurrogateNames) {
    if (name == e.name) return e.kind;
  }
  throw std::invalid_argument("unknown surrogate '" + name + "'");
}

const std::vector<SurrogateKind>& all_surrogates() {
  static const std::vector<SurrogateKind> v = [] {
    std::vector<SurrogateKind> out;
    for (const auto& e : kSurrogateNames) out.push_back(e.kind);
    return out;
  }();
  return v;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(path + "." + key, "unknown field");
    }
  }
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw ConfigError(path, "must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(path, "expected a nonnegative integer");
}

std::size_t as_count(const json& j, const std::string& path, std::size_t min) {
  const std::uint64_t v = as_u64(j, path);
  if (v < min) throw ConfigError(path, fmt::format("must be at least {}", min));
  return static_cast<std::size_t>(v);
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json* field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

TrainConfig parse_train(const json& j, const std::string& path, TrainConfig cfg) {
  check_object(j, path, {"rounds", "max_depth", "learning_rate", "min_child_weight", "lambda_l2"});
  if (auto* v = field(j, "rounds")) cfg.rounds = static_cast<int>(as_count(*v, path + ".rounds", 0));
  if (auto* v = field(j, "max_depth")) cfg.max_depth = static_cast<int>(as_count(*v, path + ".max_depth", 1));
  if (auto* v = field(j, "learning_rate")) {
    cfg.learning_rate = as_real(*v, path + ".learning_rate");
    if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0)) {
      throw ConfigError(path + ".learning_rate", "must lie in (0, 1]");
    }
  }
  if (auto* v = field(j, "min_child_weight")) {
    cfg.min_child_weight = as_real(*v, path + ".min_child_weight");
    if (cfg.min_child_weight < 0.0) throw ConfigError(path + ".min_child_weight", "must be >= 0");
  }
  if (auto* v = field(j, "lambda_l2")) {
    cfg.lambda_l2 = as_real(*v, path + ".lambda_l2");
    if (cfg.lambda_l2 < 0.0) throw ConfigError(path + ".lambda_l2", "must be >= 0");
  }
  return cfg;
}

ReproductionConfig parse_reproduction(const json& j, const std::string& path, ReproductionConfig cfg) {
  check_object(j, path, {"m_bins", "end_bin_value", "local_ratio", "jitter_fraction"});
  if (auto* v = field(j, "m_bins")) cfg.m_bins = as_count(*v, path + ".m_bins", 3);
  if (auto* v = field(j, "end_bin_value")) {
    cfg.end_bin_value = as_real(*v, path + ".end_bin_value");
    if (cfg.end_bin_value < 0.0) throw ConfigError(path + ".end_bin_value", "must be >= 0");
  }
  if (auto* v = field(j, "local_ratio")) {
    cfg.local_ratio = as_real(*v, path + ".local_ratio");
    if (cfg.local_ratio < 0.0 || cfg.local_ratio > 1.0) {
      throw ConfigError(path + ".local_ratio", "must lie in [0, 1]");
    }
  }
  if (auto* v = field(j, "jitter_fraction")) {
    cfg.jitter_fraction = as_real(*v, path + ".jitter_fraction");
    if (cfg.jitter_fraction < 0.0) throw ConfigError(path + ".jitter_fraction", "must be >= 0");
  }
  return cfg;
}

double parse_t(const json& j, const std::string& path) {
  const double t = as_real(j, path);
  if (!(t > 0.0 && t < 1.0)) throw ConfigError(path, "must lie in (0, 1)");
  return t;
}

AlgoConfig parse_algo(const json& j, const std::string& path) {
  check_object(j, path,
               {"population_size", "fe_max", "alpha", "t", "reproduction", "fitness_model",
                "category_model", "regressor", "classifier"});
  AlgoConfig a;
  if (auto* v = field(j, "population_size")) a.population_size = as_count(*v, path + ".population_size", 3);
  if (auto* v = field(j, "fe_max")) a.fe_max = as_count(*v, path + ".fe_max", 1);
  if (auto* v = field(j, "alpha")) a.alpha = as_count(*v, path + ".alpha", 2);
  if (auto* v = field(j, "t")) a.t = parse_t(*v, path + ".t");
  if (auto* v = field(j, "reproduction")) a.reproduction = parse_reproduction(*v, path + ".reproduction", a.reproduction);
  if (auto* v = field(j, "fitness_model")) a.fitness_model = parse_train(*v, path + ".fitness_model", a.fitness_model);
  if (auto* v = field(j, "category_model")) a.category_model = parse_train(*v, path + ".category_model", a.category_model);
  if (auto* v = field(j, "regressor")) a.regressor = parse_train(*v, path + ".regressor", a.regressor);
  if (auto* v = field(j, "classifier")) a.classifier = parse_train(*v, path + ".classifier", a.classifier);
  if (a.fe_max < a.population_size) throw ConfigError(path + ".fe_max", "must be at least population_size");
  if (a.alpha > a.fe_max) throw ConfigError(path + ".alpha", "must not exceed fe_max");
  a.validate();
  return a;
}

std::vector<std::size_t> parse_dims(const json& j, const std::string& path) {
  std::vector<std::size_t> dims;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError(path, "must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) dims.push_back(as_count(j[i], fmt::format("{}[{}]", path, i), 2));
  } else {
    dims.push_back(as_count(j, path, 2));
  }
  return dims;
}

void check_problem_name(const std::string& name, const std::string& path) {
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError(path, "unknown problem '" + name + "'");
  }
}

Variant parse_variant_at(const json& j, const std::string& path) {
  const std::string name = as_string(j, path);
  try {
    return parse_variant(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError(path, "unknown variant '" + name + "'");
  }
}

bool matches(const CellOverride& o, const ProblemEntry& p, Variant v) {
  return (!o.problem || *o.problem == p.name) && (!o.dim || *o.dim == p.dim) &&
         (!o.variant || *o.variant == v);
}

}  // namespace

AlgoConfig ExperimentConfig::algo_for(const ProblemEntry& p, Variant v) const {
  json merged = algo;
  std::string path = "config.algo";
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    if (!matches(overrides[i], p, v)) continue;
    merged.merge_patch(overrides[i].algo);
    path = fmt::format("config.overrides[{}].algo", i);
  }
  AlgoConfig a;
  try {
    a = parse_algo(merged, path);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  a.variant = v;
  return a;
}

std::string ExperimentConfig::reference_name() const {
  if (!reference.empty()) return reference;
  for (Variant v : variants) {
    if (v == Variant::Full) return variant_name(v);
  }
  return variants.empty() ? std::string() : std::string(variant_name(variants.front()));
}

void ExperimentConfig::validate() const {
  if (problems.empty()) throw ConfigError("config.problems", "must name at least one problem");
  if (variants.empty()) throw ConfigError("config.variants", "must name at least one variant");
  if (runs < 1) throw ConfigError("config.runs", "must be at least 1");
  if (jobs < 1) throw ConfigError("config.jobs", "must be at least 1");
  std::set<std::string> keys;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    check_problem_name(problems[i].name, fmt::format("config.problems[{}]", i));
    if (problems[i].dim < 2) throw ConfigError(fmt::format("config.problems[{}]", i), "dimension must be at least 2");
    if (!keys.insert(problems[i].key()).second) {
      throw ConfigError("config.problems", "duplicate problem " + problems[i].key());
    }
  }
  std::set<Variant> seen;
  for (Variant v : variants) {
    if (!seen.insert(v).second) throw ConfigError("config.variants", std::string("duplicate variant ") + variant_name(v));
  }
  const std::string ref = reference_name();
  if (std::none_of(variants.begin(), variants.end(), [&](Variant v) { return ref == variant_name(v); })) {
    throw ConfigError("config.reference", "'" + ref + "' is not one of the configured variants");
  }
  for (const auto& p : problems) {
    for (Variant v : variants) (void)algo_for(p, v);
  }
  // Derived seeds must not collide anywhere in the experiment.
  std::set<std::uint64_t> seeds;
  for (const auto& p : problems) {
    for (Variant v : variants) {
      for (std::size_t r = 0; r < runs; ++r) {
        if (!seeds.insert(derive_seed(seed, p.key(), variant_name(v), r)).second) {
          throw ConfigError("config.seed", fmt::format("derived seed collision at {}/{}/{}", p.key(), variant_name(v), r));
        }
      }
    }
  }
  if (accuracy.generations < 1) throw ConfigError("config.accuracy.generations", "must be at least 1");
  if (accuracy.population_size < 3) throw ConfigError("config.accuracy.population_size", "must be at least 3");
  if (variance.generations < 1) throw ConfigError("config.variance.generations", "must be at least 1");
  if (variance.population_size < 3) throw ConfigError("config.variance.population_size", "must be at least 3");
}

ExperimentConfig parse_config(const json& doc) {
  const std::string root = "config";
  check_object(doc, root,
               {"problems", "dims", "variants", "runs", "seed", "jobs", "reference", "output_dir", "algo",
                "overrides", "accuracy", "variance"});
  ExperimentConfig cfg;

  std::vector<std::size_t> default_dims{20};
  if (auto* v = field(doc, "dims")) default_dims = parse_dims(*v, root + ".dims");

  const json* problems = field(doc, "problems");
  if (!problems) throw ConfigError(root + ".problems", "required field is missing");
  if (!problems->is_array() || problems->empty()) {
    throw ConfigError(root + ".problems", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < problems->size(); ++i) {
    const std::string path = fmt::format("{}.problems[{}]", root, i);
    const json& e = (*problems)[i];
    if (e.is_string()) {
      const std::string name = e.get<std::string>();
      if (name == "lzg") {
        for (const auto& n : lzg_names()) {
          for (std::size_t d : default_dims) cfg.problems.push_back({n, d});
        }
        continue;
      }
      check_problem_name(name, path);
      for (std::size_t d : default_dims) cfg.problems.push_back({name, d});
    } else if (e.is_object()) {
      check_object(e, path, {"name", "dims"});
      const json* name = field(e, "name");
      if (!name) throw ConfigError(path + ".name", "required field is missing");
      const std::string n = as_string(*name, path + ".name");
      check_problem_name(n, path + ".name");
      const auto dims = field(e, "dims") ? parse_dims(e["dims"], path + ".dims") : default_dims;
      for (std::size_t d : dims) cfg.problems.push_back({n, d});
    } else {
      throw ConfigError(path, "expected a problem name or an object with name and dims");
    }
  }

  if (auto* v = field(doc, "variants")) {
    if (v->is_string() && v->get<std::string>() == "all") {
      cfg.variants = all_variants();
    } else if (!v->is_array() || v->empty()) {
      throw ConfigError(root + ".variants", "expected \"all\" or a non-empty array");
    } else {
      cfg.variants.clear();
    }
    for (std::size_t i = 0; v->is_array() && i < v->size(); ++i) {
      const std::string path = fmt::format("{}.variants[{}]", root, i);
      if ((*v)[i].is_string() && (*v)[i].get<std::string>() == "all") {
        for (Variant a : all_variants()) cfg.variants.push_back(a);
        continue;
      }
      cfg.variants.push_back(parse_variant_at((*v)[i], path));
    }
  }
  if (auto* v = field(doc, "runs")) cfg.runs = as_count(*v, root + ".runs", 1);
  if (auto* v = field(doc, "seed")) cfg.seed = as_u64(*v, root + ".seed");
  if (auto* v = field(doc, "jobs")) cfg.jobs = as_count(*v, root + ".jobs", 1);
  if (auto* v = field(doc, "reference")) {
    cfg.reference = variant_name(parse_variant_at(*v, root + ".reference"));
  }
  if (auto* v = field(doc, "output_dir")) cfg.output_dir = as_string(*v, root + ".output_dir");
  if (auto* v = field(doc, "algo")) {
    if (!v->is_object()) throw ConfigError(root + ".algo", "expected an object");
    cfg.algo = *v;
  }
  // Parse once on its own so structural errors point at config.algo.
  const AlgoConfig base = parse_algo(cfg.algo, root + ".algo");

  if (auto* v = field(doc, "overrides")) {
    if (!v->is_array()) throw ConfigError(root + ".overrides", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = fmt::format("{}.overrides[{}]", root, i);
      const json& o = (*v)[i];
      check_object(o, path, {"problem", "dim", "variant", "algo"});
      CellOverride co;
      if (auto* p = field(o, "problem")) {
        co.problem = as_string(*p, path + ".problem");
        check_problem_name(*co.problem, path + ".problem");
      }
      if (auto* p = field(o, "dim")) co.dim = as_count(*p, path + ".dim", 2);
      if (auto* p = field(o, "variant")) co.variant = parse_variant_at(*p, path + ".variant");
      const json* a = field(o, "algo");
      if (!a) throw ConfigError(path + ".algo", "required field is missing");
      if (!a->is_object()) throw ConfigError(path + ".algo", "expected an object");
      co.algo = *a;
      cfg.overrides.push_back(std::move(co));
    }
  }

  cfg.accuracy.t = base.t;
  cfg.accuracy.population_size = base.population_size;
  cfg.accuracy.fitness_model = base.fitness_model;
  cfg.accuracy.category_model = base.category_model;
  cfg.accuracy.regressor = base.regressor;
  cfg.accuracy.classifier = base.classifier;
  cfg.accuracy.reproduction = base.reproduction;
  if (auto* v = field(doc, "accuracy")) {
    const std::string path = root + ".accuracy";
    check_object(*v, path, {"generations", "population_size", "t", "surrogates"});
    if (auto* g = field(*v, "generations")) cfg.accuracy.generations = as_count(*g, path + ".generations", 1);
    if (auto* g = field(*v, "population_size")) {
      cfg.accuracy.population_size = as_count(*g, path + ".population_size", 3);
    }
    if (auto* g = field(*v, "t")) cfg.accuracy.t = parse_t(*g, path + ".t");
    if (auto* g = field(*v, "surrogates")) {
      if (!g->is_array() || g->empty()) throw ConfigError(path + ".surrogates", "expected a non-empty array");
      cfg.accuracy.surrogates.clear();
      for (std::size_t i = 0; i < g->size(); ++i) {
        const std::string sp = fmt::format("{}.surrogates[{}]", path, i);
        const std::string name = as_string((*g)[i], sp);
        try {
          cfg.accuracy.surrogates.push_back(parse_surrogate(name));
        } catch (const std::invalid_argument&) {
          throw ConfigError(sp, "unknown surrogate '" + name + "'");
        }
      }
    }
  }
  cfg.variance.population_size = base.population_size;
  if (auto* v = field(doc, "variance")) {
    const std::string path = root + ".variance";
    check_object(*v, path, {"generations", "population_size"});
    if (auto* g = field(*v, "generations")) cfg.variance.generations = as_count(*g, path + ".generations", 1);
    if (auto* g = field(*v, "population_size")) {
      cfg.variance.population_size = as_count(*g, path + ".population_size", 3);
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read config file " + file.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& problem_key, const std::string& variant,
                          std::size_t run) {
  const std::string text = fmt::format("{}|{}|{}", problem_key, variant, run);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return base ^ splitmix64(h);
}

// ---------------------------------------------------------------------------
// Files

std::string trace_csv(const RunTrace& trace) {
  std::string out = "fes,f,best_so_far\n";
  out.reserve(out.size() + trace.records.size() * 48);
  for (const auto& r : trace.records) out += fmt::format("{},{:.17g},{:.17g}\n", r.fes, r.f, r.best_so_far);
  return out;
}

void write_text_atomic(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, file);
}

std::vector<TraceRecord> read_trace_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read trace " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != "fes,f,best_so_far") {
    throw std::runtime_error("trace " + file.string() + " lacks the fes,f,best_so_far header");
  }
  std::vector<TraceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRecord r{};
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw std::runtime_error(fmt::format("{}:{}: expected three columns", file.string(), lineno));
    }
    try {
      r.fes = static_cast<std::size_t>(std::stoull(a));
      r.f = std::stod(b);
      r.best_so_far = std::stod(c);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("{}:{}: malformed number", file.string(), lineno));
    }
    out.push_back(r);
  }
  return out;
}

namespace {

void log_line(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

// Runs tasks on up to `jobs` threads; the first exception is rethrown.
void run_pool(std::size_t jobs, const std::vector<std::function<void()>>& tasks) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> stop{false};
  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

json train_json(const TrainConfig& c) {
  return {{"objective", objective_name(c.objective)}, {"rounds", c.rounds},
          {"max_depth", c.max_depth}, {"learning_rate", c.learning_rate},
          {"min_child_weight", c.min_child_weight}, {"lambda_l2", c.lambda_l2}};
}

json algo_json(const AlgoConfig& a) {
  return {{"variant", variant_name(a.variant)},
          {"population_size", a.population_size},
          {"fe_max", a.fe_max},
          {"alpha", a.alpha},
          {"t", a.t},
          {"reproduction",
           {{"m_bins", a.reproduction.m_bins},
            {"end_bin_value", a.reproduction.end_bin_value},
            {"local_ratio", a.reproduction.local_ratio},
            {"jitter_fraction", a.reproduction.jitter_fraction}}},
          {"fitness_model", train_json(a.fitness_model)},
          {"category_model", train_json(a.category_model)},
          {"regressor", train_json(a.regressor)},
          {"classifier", train_json(a.classifier)}};
}

std::string run_file_name(std::size_t run) { return fmt::format("run_{:03d}.csv", run); }

// A cell is complete when its summary matches what would be run now.
std::optional<CellResult> load_completed(const fs::path& summary_file, const json& settings) {
  if (!fs::exists(summary_file)) return std::nullopt;
  std::ifstream in(summary_file);
  json s;
  try {
    s = json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!s.contains("settings") || s["settings"] != settings) return std::nullopt;
  CellResult r;
  r.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
  r.finals = s.at("finals").get<std::vector<double>>();
  r.skipped = true;
  for (std::size_t i = 0; i < r.finals.size(); ++i) {
    if (!fs::exists(summary_file.parent_path() / run_file_name(i))) return std::nullopt;
  }
  return r;
}

json summary_json(const json& settings, const CellResult& cell, const std::vector<double>& wall) {
  return {{"problem", cell.problem.name},
          {"dim", cell.problem.dim},
          {"variant", cell.variant},
          {"runs", cell.finals.size()},
          {"seeds", cell.seeds},
          {"finals", cell.finals},
          {"mean", stats::mean(cell.finals)},
          {"std", stats::stddev(cell.finals)},
          {"wall_seconds", wall},
          {"settings", settings}};
}

void write_tables(const fs::path& dir, const stats::SummaryTable& table) {
  write_text_atomic(dir / "comparison.csv", table.to_csv());
  write_text_atomic(dir / "comparison.txt", table.to_text());
  write_text_atomic(dir / "comparison.md", table.to_markdown());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  const fs::path probe = dir / ".write_probe";
  std::ofstream out(probe);
  if (!out) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  out.close();
  fs::remove(probe, ec);
}

// Generic batch executor shared by run and variance-demo: `cells` name a
// directory and a run function; finals are merged by cell index.
struct CellJob {
  ProblemEntry problem;
  std::string column;
  fs::path dir;
  json settings;
  std::function<RunTrace(std::uint64_t seed)> run;
  std::vector<std::uint64_t> seeds;
};

std::vector<CellResult> execute_cells(std::vector<CellJob>& jobs_list, std::size_t jobs, const RunOptions& options,
                                      std::size_t& traces_written) {
  std::vector<CellResult> results(jobs_list.size());
  std::vector<std::vector<double>> walls(jobs_list.size());
  std::vector<std::function<void()>> tasks;
  std::vector<std::size_t> pending_cells;
  std::mutex log_mu;
  for (std::size_t c = 0; c < jobs_list.size(); ++c) {
    auto& job = jobs_list[c];
    const fs::path summary = job.dir / "summary.json";
    if (!options.force) {
      if (auto done = load_completed(summary, job.settings)) {
        results[c] = std::move(*done);
        results[c].problem = job.problem;
        results[c].variant = job.column;
        log_line(options, fmt::format("skip {}/{} (complete)", job.problem.key(), job.column));
        continue;
      }
    }
    pending_cells.push_back(c);
    results[c].problem = job.problem;
    results[c].variant = job.column;
    results[c].seeds = job.seeds;
    results[c].finals.assign(job.seeds.size(), 0.0);
    walls[c].assign(job.seeds.size(), 0.0);
    for (std::size_t r = 0; r < job.seeds.size(); ++r) {
      tasks.push_back([&, c, r] {
        auto& jb = jobs_list[c];
        const RunTrace trace = jb.run(jb.seeds[r]);
        write_text_atomic(jb.dir / run_file_name(r), trace_csv(trace));
        results[c].finals[r] = trace.final_best();
        walls[c][r] = trace.wall_seconds;
        std::lock_guard<std::mutex> lock(log_mu);
        ++traces_written;
        log_line(options, fmt::format("{}/{} run {} best {:.6g} ({:.1f}s)", jb.problem.key(), jb.column, r,
                                      trace.final_best(), trace.wall_seconds));
      });
    }
  }
  run_pool(jobs, tasks);
  for (std::size_t c : pending_cells) {
    write_text_atomic(jobs_list[c].dir / "summary.json",
                      summary_json(jobs_list[c].settings, results[c], walls[c]).dump(2) + "\n");
  }
  return results;
}

stats::SummaryTable table_from(const std::vector<CellResult>& results, const std::vector<std::string>& problem_keys,
                               const std::vector<std::string>& columns, const std::string& reference) {
  std::vector<std::vector<std::vector<double>>> finals(problem_keys.size(),
                                                       std::vector<std::vector<double>>(columns.size()));
  for (const auto& r : results) {
    const auto p = static_cast<std::size_t>(
        std::find(problem_keys.begin(), problem_keys.end(), r.problem.key()) - problem_keys.begin());
    const auto a = static_cast<std::size_t>(std::find(columns.begin(), columns.end(), r.variant) - columns.begin());
    finals.at(p).at(a) = r.finals;
  }
  return stats::summarize(problem_keys, columns, finals, reference);
}

}  // namespace

RunReport cmd_run(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ensure_dir(config.output_dir);
  std::vector<CellJob> cells;
  std::vector<std::string> problem_keys;
  std::vector<std::string> columns;
  for (Variant v : config.variants) columns.emplace_back(variant_name(v));
  for (const auto& p : config.problems) {
    problem_keys.push_back(p.key());
    for (Variant v : config.variants) {
      const AlgoConfig algo = config.algo_for(p, v);
      CellJob job;
      job.problem = p;
      job.column = variant_name(v);
      job.dir = config.output_dir / "runs" / p.key() / job.column;
      for (std::size_t r = 0; r < config.runs; ++r) job.seeds.push_back(derive_seed(config.seed, p.key(), job.column, r));
      job.settings = {{"algo", algo_json(algo)}, {"seeds", job.seeds}};
      job.run = [name = p.name, dim = p.dim, algo](std::uint64_t seed) {
        return run_drso(make_problem(name, dim), algo, seed);
      };
      cells.push_back(std::move(job));
    }
  }
  RunReport report;
  report.cells = execute_cells(cells, options.jobs.value_or(config.jobs), options, report.traces_written);
  report.table = table_from(report.cells, problem_keys, columns, config.reference_name());
  write_tables(config.output_dir, report.table);
  return report;
}

// ---------------------------------------------------------------------------
// Accuracy study

namespace {

std::vector<std::size_t> top_k_by(const std::vector<double>& key, std::size_t k, bool descending) {
  std::vector<std::size_t> order(key.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? key[a] > key[b] : key[a] < key[b];
  });
  order.resize(std::min(k, order.size()));
  return order;
}

std::size_t argmax_first(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<AccuracyRecord> run_accuracy_study(const Problem& problem, const AccuracyOptions& options,
                                               std::uint64_t seed) {
  if (options.generations < 1) throw std::invalid_argument("accuracy: generations must be positive");
  if (options.population_size < 3) throw std::invalid_argument("accuracy: population_size must be >= 3");
  if (!(options.t > 0.0 && options.t < 1.0)) throw std::invalid_argument("accuracy: t must lie in (0, 1)");
  const std::size_t n_pop = options.population_size;
  RngStream master(seed);
  RngStream init_rng = master.fork();
  RngStream repro_rng = master.fork();
  RngStream model_rng = master.fork();
  RngStream random_rng = master.fork();

  const Fitness truth = [&problem](std::span<const double> x) { return problem.evaluate(x); };
  const auto wants = [&](SurrogateKind k) {
    return std::find(options.surrogates.begin(), options.surrogates.end(), k) != options.surrogates.end();
  };

  std::vector<EvaluatedSolution> parents;
  for (auto& x : lhs_sample(problem.bounds(), n_pop, init_rng)) {
    const double f = problem.evaluate(x);
    parents.push_back({std::move(x), f});
  }
  std::stable_sort(parents.begin(), parents.end(), [](const auto& a, const auto& b) { return a.f < b.f; });

  std::vector<AccuracyRecord> records;
  for (std::size_t gen = 0; gen < options.generations; ++gen) {
    const auto q = reproduce(parents, {}, n_pop, problem.bounds(), options.reproduction, repro_rng);
    std::vector<EvaluatedSolution> q_eval;
    std::vector<double> qf;
    for (const auto& x : q) {
      qf.push_back(problem.evaluate(x));
      q_eval.push_back({x, qf.back()});
    }
    const CategoryAssignment truth_split = assign_categories(q_eval, options.t);
    const std::vector<std::size_t>& true_top = truth_split.good;
    const std::size_t k = true_top.size();

    auto push = [&](SurrogateKind kind, std::size_t best, const std::vector<std::size_t>& selected) {
      records.push_back({problem.name(), gen, kind, stats::acc1(best, qf), stats::acc2(selected, true_top),
                         selected.size()});
    };

    RelationSurrogatePair relation;
    if (wants(SurrogateKind::RC1) || wants(SurrogateKind::RC2)) {
      relation = train_relation_surrogate(parents, options.t, options.fitness_model, options.category_model,
                                          model_rng, wants(SurrogateKind::RC1), wants(SurrogateKind::RC2));
    }
    for (SurrogateKind kind : options.surrogates) {
      switch (kind) {
        case SurrogateKind::RC1: {
          std::vector<double> s;
          for (const auto& x : q) s.push_back(score_c1(relation, x));
          push(kind, argmax_first(s), top_k_by(s, k, true));
          break;
        }
        case SurrogateKind::RC2: {
          std::vector<double> s;
          for (const auto& x : q) s.push_back(score_c2(relation, x));
          std::vector<std::size_t> sel;
          for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] > 0.0) sel.push_back(i);
          }
          push(kind, argmax_first(s), sel);
          break;
        }
        case SurrogateKind::Regressor: {
          const auto model = train_fitness_regressor(parents, options.regressor, model_rng);
          std::vector<double> pred;
          for (const auto& x : q) pred.push_back(model.predict_value(x));
          push(kind, baseline_select(q, model, BaselineMode::Regression).best, top_k_by(pred, k, false));
          break;
        }
        case SurrogateKind::Classifier: {
          const auto model = train_category_classifier(parents, options.t, options.classifier, model_rng);
          const auto sel = baseline_select(q, model, BaselineMode::Classification);
          push(kind, sel.best, sel.positive);
          break;
        }
        case SurrogateKind::Random: {
          const auto best = static_cast<std::size_t>(random_rng.below(q.size()));
          push(kind, best, random_rng.sample_without_replacement(q.size(), k));
          break;
        }
        case SurrogateKind::Oracle: {
          // Reference set is the offspring itself so the oracle scores are strictly ordered.
          std::vector<double> sorted = qf;
          std::sort(sorted.begin(), sorted.end());
          const double boundary = 0.5 * (sorted[k - 1] + sorted[k]);
          RelationSurrogatePair oracle;
          oracle.m1 = std::make_shared<FitnessOracleC1>(truth);
          oracle.m2 = std::make_shared<FitnessOracleC2>(truth, boundary);
          oracle.training_solutions = q;
          oracle.categories = truth_split;
          push(kind, select_best(q, oracle).first, unevaluated_indices(q, oracle, std::nullopt));
          break;
        }
      }
    }

    // Select-N: parents become the N best of parents and offspring.
    for (auto& e : q_eval) parents.push_back(std::move(e));
    std::stable_sort(parents.begin(), parents.end(), [](const auto& a, const auto& b) { return a.f < b.f; });
    parents.resize(n_pop);
  }
  return records;
}

std::vector<AccuracySummary> summarize_accuracy(const std::vector<AccuracyRecord>& records) {
  std::vector<std::pair<std::string, SurrogateKind>> keys;
  std::map<std::pair<std::string, SurrogateKind>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.problem, r.surrogate);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].first.push_back(static_cast<double>(r.acc1));
    groups[key].second.push_back(r.acc2);
  }
  std::vector<AccuracySummary> out;
  for (const auto& key : keys) {
    const auto& [a1, a2] = groups[key];
    AccuracySummary s;
    s.problem = key.first;
    s.surrogate = key.second;
    s.generations = a1.size();
    s.mean_acc1 = stats::mean(a1);
    s.std_acc1 = stats::stddev(a1);
    s.median_acc1 = stats::quantile(a1, 0.5);
    s.q25_acc1 = stats::quantile(a1, 0.25);
    s.q75_acc1 = stats::quantile(a1, 0.75);
    s.mean_acc2 = stats::mean(a2);
    s.std_acc2 = stats::stddev(a2);
    s.median_acc2 = stats::quantile(a2, 0.5);
    s.q25_acc2 = stats::quantile(a2, 0.25);
    s.q75_acc2 = stats::quantile(a2, 0.75);
    out.push_back(s);
  }
  return out;
}

std::vector<AccuracySummary> cmd_accuracy(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const fs::path dir = config.output_dir / "accuracy";
  ensure_dir(dir);
  std::vector<std::vector<AccuracyRecord>> per_problem(config.problems.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < config.problems.size(); ++i) {
    tasks.push_back([&, i] {
      const auto& p = config.problems[i];
      per_problem[i] = run_accuracy_study(make_problem(p.name, p.dim), config.accuracy,
                                          derive_seed(config.seed, p.key(), "accuracy", 0));
      for (auto& r : per_problem[i]) r.problem = p.key();
      log_line(options, fmt::format("accuracy {} done", p.key()));
    });
  }
  run_pool(options.jobs.value_or(config.jobs), tasks);

  std::vector<AccuracyRecord> all;
  for (auto& v : per_problem) all.insert(all.end(), v.begin(), v.end());
  std::string gen_csv = "problem,generation,surrogate,acc1,acc2,selected\n";
  for (const auto& r : all) {
    gen_csv += fmt::format("{},{},{},{},{:.17g},{}\n", r.problem, r.generation, surrogate_name(r.surrogate), r.acc1,
                           r.acc2, r.selected);
  }
  write_text_atomic(dir / "generations.csv", gen_csv);

  const auto summary = summarize_accuracy(all);
  std::string sum_csv =
      "problem,surrogate,generations,mean_acc1,std_acc1,median_acc1,q25_acc1,q75_acc1,mean_acc2,std_acc2,"
      "median_acc2,q25_acc2,q75_acc2\n";
  for (const auto& s : summary) {
    sum_csv += fmt::format("{},{},{},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g}\n",
                           s.problem, surrogate_name(s.surrogate), s.generations, s.mean_acc1, s.std_acc1,
                           s.median_acc1, s.q25_acc1, s.q75_acc1, s.mean_acc2, s.std_acc2, s.median_acc2,
                           s.q25_acc2, s.q75_acc2);
  }
  write_text_atomic(dir / "summary.csv", sum_csv);
  return summary;
}

// ---------------------------------------------------------------------------
// Variance demo

stats::SummaryTable cmd_variance_demo(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const fs::path dir = config.output_dir / "variance";
  ensure_dir(dir);
  const std::vector<SelectionMode> modes{SelectionMode::SelectN, SelectionMode::Select1};
  std::vector<std::string> columns;
  for (auto m : modes) columns.emplace_back(selection_mode_name(m));

  const AlgoConfig base = parse_algo(config.algo, "config.algo");
  std::vector<CellJob> cells;
  std::vector<std::string> problem_keys;
  for (const auto& p : config.problems) {
    problem_keys.push_back(p.key());
    for (auto m : modes) {
      CellJob job;
      job.problem = p;
      job.column = selection_mode_name(m);
      job.dir = dir / "runs" / p.key() / job.column;
      for (std::size_t r = 0; r < config.runs; ++r) {
        job.seeds.push_back(derive_seed(config.seed, p.key(), "variance-" + job.column, r));
      }
      job.settings = {{"mode", job.column},
                      {"generations", config.variance.generations},
                      {"population_size", config.variance.population_size},
                      {"reproduction", algo_json(base)["reproduction"]},
                      {"seeds", job.seeds}};
      job.run = [name = p.name, dim = p.dim, m, gens = config.variance.generations,
                 n = config.variance.population_size, repro = base.reproduction](std::uint64_t seed) {
        return run_plain_eda(make_problem(name, dim), m, gens, n, seed, repro);
      };
      cells.push_back(std::move(job));
    }
  }
  std::size_t written = 0;
  const auto results = execute_cells(cells, options.jobs.value_or(config.jobs), options, written);
  auto table = table_from(results, problem_keys, columns, selection_mode_name(SelectionMode::SelectN));
  write_tables(dir, table);
  return table;
}

// ---------------------------------------------------------------------------
// Curves

std::vector<fs::path> cmd_curves(const fs::path& dir) {
  const fs::path runs = dir / "runs";
  if (!fs::is_directory(runs)) throw std::runtime_error("no runs directory under " + dir.string());
  std::vector<fs::path> cell_dirs;
  for (const auto& p : fs::directory_iterator(runs)) {
    if (!p.is_directory()) continue;
    for (const auto& v : fs::directory_iterator(p.path())) {
      if (v.is_directory()) cell_dirs.push_back(v.path());
    }
  }
  std::sort(cell_dirs.begin(), cell_dirs.end());

  std::vector<fs::path> written;
  for (const auto& cell : cell_dirs) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(cell)) {
      const std::string name = f.path().filename().string();
      if (name.rfind("run_", 0) == 0 && f.path().extension() == ".csv") files.push_back(f.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    std::vector<std::vector<TraceRecord>> traces;
    for (const auto& f : files) traces.push_back(read_trace_csv(f));
    const std::size_t rows = traces.front().size();
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].size() != rows) {
        throw std::runtime_error(fmt::format("{} has {} rows but {} has {}", files[i].string(), traces[i].size(),
                                             files.front().string(), rows));
      }
    }
    std::string out = "fes,median,q25,q75\n";
    std::vector<double> column(traces.size());
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t fes = traces.front()[r].fes;
      for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i][r].fes != fes) {
          throw std::runtime_error(fmt::format("{} row {} has fes {} instead of {}", files[i].string(), r + 1,
                                               traces[i][r].fes, fes));
        }
        column[i] = traces[i][r].best_so_far;
      }
      out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", fes, stats::quantile(column, 0.5),
                         stats::quantile(column, 0.25), stats::quantile(column, 0.75));
    }
    const fs::path target = dir / "curves" /
                            fmt::format("{}__{}.csv", cell.parent_path().filename().string(), cell.filename().string());
    write_text_atomic(target, out);
    written.push_back(target);
  }
  if (written.empty()) throw std::runtime_error("no traces found under " + runs.string());
  return written;
}

}  // namespace drso::harness
