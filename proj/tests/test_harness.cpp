#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "drso/harness.hpp"
#include "drso/problems.hpp"

using namespace drso;
using namespace drso::harness;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("drso_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json tiny_algo() {
  const json model = {{"rounds", 3}, {"max_depth", 3}};
  return {{"population_size", 5}, {"fe_max", 8},          {"alpha", 5},
          {"fitness_model", model}, {"category_model", model}, {"regressor", model}, {"classifier", model}};
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsAndProblemForms) {
  const auto cfg = parse_config({{"problems", {"lzg", {{"name", "yllf01"}, {"dims", {20, 50}}}}}, {"dims", {20}}});
  ASSERT_EQ(cfg.problems.size(), 6u);
  EXPECT_EQ(cfg.problems[0].key(), "ellipsoid-20d");
  EXPECT_EQ(cfg.problems[5].key(), "yllf01-50d");
  EXPECT_EQ(cfg.runs, 30u);
  EXPECT_EQ(cfg.reference_name(), "full");
  const auto all = parse_config({{"problems", {"ackley"}}, {"variants", "all"}});
  EXPECT_EQ(all.variants.size(), 6u);
}

TEST(Config, ErrorsNameTheFieldPath) {
  EXPECT_EQ(error_of({{"problems", {"x"}}}).rfind("config.problems[0]: unknown problem 'x'", 0), 0u);
  EXPECT_EQ(error_of({{"problem", {"ackley"}}}).rfind("config.problem: unknown field", 0), 0u);
  EXPECT_EQ(error_of({{"problems", {"ackley"}}, {"runs", 0}}).rfind("config.runs", 0), 0u);
  EXPECT_EQ(error_of({{"problems", {"ackley"}}, {"algo", {{"t", 1.5}}}}).rfind("config.algo.t", 0), 0u);
  EXPECT_EQ(error_of({{"problems", {"ackley"}}, {"algo", {{"fitness_model", {{"rounds", -1}}}}}})
                .rfind("config.algo.fitness_model.rounds", 0),
            0u);
  EXPECT_EQ(error_of({{"problems", {"ackley"}}, {"variants", {"full", "nope"}}}).rfind("config.variants[1]", 0), 0u);
  EXPECT_EQ(error_of({{"problems", {"ackley"}}, {"reference", "gen1-no-pu"}}).rfind("config.reference", 0), 0u);
  EXPECT_EQ(error_of(json::object()).rfind("config.problems: required", 0), 0u);
  EXPECT_FALSE(error_of({{"problems", {"ackley"}}, {"accuracy", {{"surrogates", {"psychic"}}}}}).empty());
}

TEST(Config, OverridesPatchMatchingCellsOnly) {
  const auto cfg = parse_config({{"problems", {"ackley", "griewank"}},
                                 {"variants", {"full", "gen1-no-pu"}},
                                 {"algo", {{"fe_max", 300}}},
                                 {"overrides", {{{"problem", "ackley"}, {"variant", "full"}, {"algo", {{"fe_max", 400}}}}}}});
  EXPECT_EQ(cfg.algo_for(cfg.problems[0], Variant::Full).fe_max, 400u);
  EXPECT_EQ(cfg.algo_for(cfg.problems[0], Variant::Gen1NoPu).fe_max, 300u);
  EXPECT_EQ(cfg.algo_for(cfg.problems[1], Variant::Full).fe_max, 300u);
}

TEST(Config, LoadsFileWithComments) {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "c.json");
    out << "// experiment\n{\"problems\": [\"ackley\"], \"runs\": 2}\n";
  }
  EXPECT_EQ(load_config(dir / "c.json").runs, 2u);
  {
    std::ofstream out(dir / "bad.json");
    out << "{\"problems\": [";
  }
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), std::runtime_error);
}

TEST(Seeds, StableAndUnique) {
  EXPECT_EQ(derive_seed(1, "ackley-20d", "full", 0), derive_seed(1, "ackley-20d", "full", 0));
  std::set<std::uint64_t> seen;
  for (const auto& p : {"ackley-20d", "ackley-50d", "griewank-20d"})
    for (const auto& v : {"full", "gen1-no-pu"})
      for (std::size_t r = 0; r < 30; ++r) EXPECT_TRUE(seen.insert(derive_seed(7, p, v, r)).second);
  EXPECT_NE(derive_seed(1, "a", "b", 0), derive_seed(2, "a", "b", 0));
}

TEST(TraceCsv, RoundTripsExactly) {
  RunTrace t;
  t.records = {{1, 0.1, 0.1}, {2, 1.0 / 3.0, 0.1}, {3, 1e-300, 1e-300}};
  const fs::path f = scratch("trace.csv");
  write_text_atomic(f, trace_csv(t));
  const auto back = read_trace_csv(f);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].fes, t.records[i].fes);
    EXPECT_EQ(back[i].f, t.records[i].f);
    EXPECT_EQ(back[i].best_so_far, t.records[i].best_so_far);
  }
  EXPECT_FALSE(fs::exists(f.string() + ".tmp"));
}

TEST(CmdRun, WritesTracesSummaryAndSkipsCompletedCells) {
  const fs::path out = scratch("run");
  auto cfg = parse_config({{"problems", {{{"name", "ellipsoid"}, {"dims", {3}}}}},
                           {"runs", 2},
                           {"seed", 5},
                           {"output_dir", out.string()},
                           {"algo", tiny_algo()}});
  const auto first = cmd_run(cfg);
  EXPECT_EQ(first.traces_written, 2u);
  const fs::path cell = out / "runs" / "ellipsoid-3d" / "full";
  EXPECT_TRUE(fs::exists(cell / "run_000.csv"));
  EXPECT_TRUE(fs::exists(cell / "run_001.csv"));
  EXPECT_TRUE(fs::exists(cell / "summary.json"));
  for (const char* f : {"comparison.csv", "comparison.txt", "comparison.md"}) EXPECT_TRUE(fs::exists(out / f));
  const auto trace0 = slurp(cell / "run_000.csv");
  const auto rows = read_trace_csv(cell / "run_000.csv");
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows.back().best_so_far, first.cells[0].finals[0]);

  const auto second = cmd_run(cfg);
  EXPECT_EQ(second.traces_written, 0u);
  EXPECT_TRUE(second.cells[0].skipped);
  EXPECT_EQ(second.cells[0].finals, first.cells[0].finals);

  // Forced reruns reproduce identical bytes.
  RunOptions force;
  force.force = true;
  EXPECT_EQ(cmd_run(cfg, force).traces_written, 2u);
  EXPECT_EQ(slurp(cell / "run_000.csv"), trace0);

  // A changed setting invalidates the cell.
  cfg.algo["fe_max"] = 9;
  EXPECT_EQ(cmd_run(cfg).traces_written, 2u);
  EXPECT_EQ(read_trace_csv(cell / "run_000.csv").size(), 9u);

  // A deleted trace makes the cell incomplete.
  fs::remove(cell / "run_001.csv");
  EXPECT_EQ(cmd_run(cfg).traces_written, 2u);
}

TEST(CmdRun, ParallelWorkersMatchSerial) {
  const fs::path a = scratch("serial"), b = scratch("parallel");
  auto doc = json{{"problems", {{{"name", "ackley"}, {"dims", {3}}}}},
                  {"variants", {"full", "sel2-random-qbest"}},
                  {"runs", 3},
                  {"algo", tiny_algo()}};
  doc["output_dir"] = a.string();
  cmd_run(parse_config(doc));
  doc["output_dir"] = b.string();
  doc["jobs"] = 3;
  cmd_run(parse_config(doc));
  for (const char* v : {"full", "sel2-random-qbest"}) {
    for (const char* r : {"run_000.csv", "run_001.csv", "run_002.csv"}) {
      const fs::path rel = fs::path("runs") / "ackley-3d" / v / r;
      EXPECT_EQ(slurp(a / rel), slurp(b / rel));
    }
  }
  EXPECT_EQ(slurp(a / "comparison.csv"), slurp(b / "comparison.csv"));
}

TEST(CmdCurves, MedianAndQuartilesPerEvaluation) {
  const fs::path out = scratch("curves");
  cmd_run(parse_config({{"problems", {{{"name", "griewank"}, {"dims", {3}}}}},
                        {"runs", 3},
                        {"output_dir", out.string()},
                        {"algo", tiny_algo()}}));
  const auto files = cmd_curves(out);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename(), "griewank-3d__full.csv");
  std::ifstream in(files[0]);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "fes,median,q25,q75");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 8u);
  EXPECT_THROW(cmd_curves(scratch("nothing")), std::runtime_error);
}

TEST(Accuracy, OracleIsPerfectAndRandomIsCalibrated) {
  AccuracyOptions opt;
  opt.generations = 50;
  opt.population_size = 50;
  opt.surrogates = {SurrogateKind::Oracle, SurrogateKind::Random};
  const auto recs = run_accuracy_study(make_problem("ellipsoid", 5), opt, 3);
  ASSERT_EQ(recs.size(), 100u);
  for (const auto& r : recs) {
    if (r.surrogate == SurrogateKind::Oracle) {
      EXPECT_EQ(r.acc1, 1u);
      EXPECT_EQ(r.acc2, 1.0);
    }
  }
  const auto summary = summarize_accuracy(recs);
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[1].surrogate, SurrogateKind::Random);
  EXPECT_NEAR(summary[1].mean_acc2, 0.5, 0.1);
  EXPECT_EQ(summary[0].generations, 50u);
}

TEST(Accuracy, CommandWritesPerGenerationAndSummaryFiles) {
  const fs::path out = scratch("accuracy");
  auto cfg = parse_config({{"problems", {{{"name", "ellipsoid"}, {"dims", {3}}}}},
                           {"output_dir", out.string()},
                           {"accuracy", {{"generations", 2}, {"population_size", 10}}},
                           {"algo", tiny_algo()}});
  const auto summary = cmd_accuracy(cfg);
  EXPECT_EQ(summary.size(), all_surrogates().size());
  EXPECT_TRUE(fs::exists(out / "accuracy" / "generations.csv"));
  EXPECT_TRUE(fs::exists(out / "accuracy" / "summary.csv"));
  std::ifstream in(out / "accuracy" / "generations.csv");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 1 + 2 * all_surrogates().size());
}

TEST(VarianceDemo, OneGenerationCounts) {
  const fs::path out = scratch("variance");
  auto cfg = parse_config({{"problems", {{{"name", "ackley"}, {"dims", {3}}}}},
                           {"runs", 2},
                           {"output_dir", out.string()},
                           {"variance", {{"generations", 1}, {"population_size", 6}}}});
  const auto table = cmd_variance_demo(cfg);
  EXPECT_EQ(table.algorithms, (std::vector<std::string>{"select-N", "select-1"}));
  EXPECT_EQ(table.reference, "select-N");
  const fs::path runs = out / "variance" / "runs" / "ackley-3d";
  EXPECT_EQ(read_trace_csv(runs / "select-N" / "run_000.csv").size(), 12u);
  EXPECT_EQ(read_trace_csv(runs / "select-1" / "run_000.csv").size(), 7u);
  EXPECT_TRUE(fs::exists(out / "variance" / "comparison.txt"));
}
