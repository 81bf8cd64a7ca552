#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "cloudopt/config.hpp"
#include "cloudopt/io.hpp"
#include "cloudopt/problem.hpp"
#include "helpers.hpp"

using namespace cloudopt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cloudopt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  TempDir dir;
  const std::string cfg_path = dir.file("run.cfg");
  write_text(cfg_path,
             "# surrogate benchmark\n"
             "method = single-chaos\n"
             "plant.a = 1.2 -0.4\n"
             "plant.b = 0.5\n"
             "plant.noise_std = 0.05\n"
             "sim.horizon = 100\n"
             "sim.dt = 0.1\n"
             "search.max_m1 = 3\n"
             "search.max_m2 = 3\n"
             "search.max_o = 5\n"
             "search.pu = 10\n"
             "objective.threshold = 0.02  # inline comment\n"
             "objective.eval_budget = 5000\n"
             "seeds = 1 2 3\n");
  const RunConfig rc = RunConfig::from_file(cfg_path);
  CHECK(rc.method == Method::SingleChaos);
  CHECK((rc.problem.plant.a == std::vector<double>{1.2, -0.4}));
  CHECK((rc.problem.plant.b == std::vector<double>{0.5}));
  CHECK(rc.problem.plant.noise_std == 0.05);
  CHECK(rc.problem.sim.horizon == 100);
  CHECK(rc.problem.bounds.layout.cap_m1 == 3);
  CHECK(rc.problem.bounds.layout.cap_o == 5);
  CHECK(rc.problem.bounds.pu == 10.0);
  CHECK(rc.pipeline.threshold == 0.02);
  CHECK(rc.pipeline.eval_budget == 5000);
  CHECK((rc.seeds == std::vector<std::uint64_t>{1, 2, 3}));
  // Defaults fill the rest.
  CHECK(rc.pipeline.ga.population == 40);
  CHECK(rc.pipeline.chaos.contraction_lambda == 0.5);
}

TEST_CASE("config errors") {
  TempDir dir;
  CHECK_THROWS_AS(RunConfig::from_file(dir.file("missing.cfg")), config_error);

  const std::string bad_line = dir.file("bad_line.cfg");
  write_text(bad_line, "plant.a 1.2\n");
  CHECK_THROWS_AS(RunConfig::from_file(bad_line), config_error);

  const std::string unknown = dir.file("unknown.cfg");
  write_text(unknown, "plant.gain = 3\n");
  CHECK_THROWS_AS(RunConfig::from_file(unknown), config_error);

  const std::string dup = dir.file("dup.cfg");
  write_text(dup, "sim.dt = 0.1\nsim.dt = 0.2\n");
  CHECK_THROWS_AS(RunConfig::from_file(dup), config_error);

  const std::string bad_method = dir.file("bad_method.cfg");
  write_text(bad_method, "method = annealing\n");
  CHECK_THROWS_AS(RunConfig::from_file(bad_method), config_error);

  const std::string bad_value = dir.file("bad_value.cfg");
  write_text(bad_value, "sim.horizon = fast\n");
  CHECK_THROWS_AS(RunConfig::from_file(bad_value), config_error);

  const std::string bad_range = dir.file("bad_range.cfg");
  write_text(bad_range, "chaos.lambda = 1.5\n");
  CHECK_THROWS_AS(RunConfig::from_file(bad_range), config_error);
}

TEST_CASE("params JSON round trip is lossless and byte-stable") {
  Rng rng(808);
  TempDir dir;
  for (int trial = 0; trial < 25; ++trial) {
    const ParameterVector p = testutil::random_valid_params(rng);
    const std::string first = dir.file("params_a.json");
    write_params_json(first, p);
    const ParameterVector q = read_params_json(first);
    const std::string second = dir.file("params_b.json");
    write_params_json(second, q);
    CHECK(read_text(first) == read_text(second));
    CHECK(q.structure.m1 == p.structure.m1);
    CHECK(q.rules.entries == p.rules.entries);
  }
}

TEST_CASE("params JSON rejects malformed and invalid files") {
  TempDir dir;
  const std::string bad = dir.file("bad.json");
  write_text(bad, "{ not json");
  CHECK_THROWS_AS(read_params_json(bad), config_error);

  const std::string missing_key = dir.file("missing_key.json");
  write_text(missing_key, "{\"structure\": {\"m1\": 1}}");
  CHECK_THROWS_AS(read_params_json(missing_key), config_error);

  const std::string invalid = dir.file("invalid.json");
  write_text(invalid,
             "{\"structure\": {\"m1\": 1, \"m2\": 1, \"o\": 1, \"pu\": 1},"
             "\"in1_clouds\": [{\"ex\": 3.0, \"en\": 0.1, \"he\": 0}],"
             "\"in2_clouds\": [{\"ex\": 0.0, \"en\": 0.1, \"he\": 0}],"
             "\"out_singletons\": [0.5], \"rules\": [1], \"ku\": 0.5}");
  CHECK_THROWS_AS(read_params_json(invalid), config_error);

  CHECK_THROWS_AS(read_params_json(dir.file("nope.json")), config_error);
}

TEST_CASE("trace CSV format") {
  EpisodeTrace t;
  t.rows.push_back({1, 1.0, 0.0, 0.123456789123, 1.0});
  t.rows.push_back({2, 1.0, 0.25, -0.5, 0.75});
  TempDir dir;
  const std::string path = dir.file("trace.csv");
  write_trace_csv(path, t);
  const std::string text = read_text(path);
  CHECK(text ==
        "k,r,y,u,e\n"
        "1,1,0,0.123456789,1\n"
        "2,1,0.25,-0.5,0.75\n");
}

TEST_CASE("report JSON has the exact key set") {
  OptimizerReport r;
  r.method = "hybrid";
  r.seed = 42;
  r.evals_to_threshold = 1234;
  r.best_cost = 0.000912345678;
  r.chaos_evals = 1000;
  r.cg_evals = 234;
  TempDir dir;
  const std::string path = dir.file("report.json");
  write_report_json(path, r);
  CHECK(read_text(path) ==
        "{\n"
        "  \"method\": \"hybrid\",\n"
        "  \"seed\": 42,\n"
        "  \"evals_to_threshold\": 1234,\n"
        "  \"best_cost\": 0.000912345678,\n"
        "  \"chaos_evals\": 1000,\n"
        "  \"cg_evals\": 234\n"
        "}\n");

  r.evals_to_threshold.reset();
  write_report_json(path, r);
  CHECK(read_text(path).find("\"evals_to_threshold\": \"budget-exhausted\"") !=
        std::string::npos);
}

TEST_CASE("table and summary CSVs") {
  OptimizerReport a;
  a.method = "hybrid";
  a.seed = 1;
  a.evals_to_threshold = 120;
  a.best_cost = 0.0005;
  OptimizerReport b;
  b.method = "hybrid";
  b.seed = 2;
  b.best_cost = 0.5;
  b.budget = 1000;
  TempDir dir;
  const std::string table = dir.file("table.csv");
  write_table_csv(table, {a, b});
  CHECK(read_text(table) ==
        "method,seed,evals_to_threshold,best_cost\n"
        "hybrid,1,120,0.0005\n"
        "hybrid,2,budget-exhausted,0.5\n");

  const MethodSummary ms = summarize("hybrid", {a, b});
  CHECK(ms.success_rate == 0.5);
  REQUIRE(ms.median_evals.has_value());  // lower median of {120, exhausted}
  CHECK(*ms.median_evals == 120);

  const MethodSummary none = summarize("hybrid", {b, b, b});
  CHECK_FALSE(none.median_evals.has_value());
  const std::string summary = dir.file("summary.csv");
  write_summary_csv(summary, {ms, none});
  CHECK(read_text(summary) ==
        "method,median_evals,success_rate\n"
        "hybrid,120,0.5\n"
        "hybrid,budget-exhausted,0\n");
}

TEST_CASE("run_method counts phases through one shared counter") {
  TuningProblem problem;
  problem.plant.a = {1.2, -0.4};
  problem.plant.b = {0.5};
  problem.plant.noise_std = 0.0;
  problem.sim.horizon = 20;
  SlotLayout layout;
  layout.cap_m1 = 2;
  layout.cap_m2 = 2;
  layout.cap_o = 3;
  problem.bounds = SearchBounds::full(layout, 5.0);

  PipelineConfig pc;
  pc.threshold = 1e-12;  // unreachable: exercise both hybrid phases
  pc.eval_budget = 600;
  pc.chaos.max_iterations = 300;
  pc.chaos.stage0_iterations = 100;
  pc.chaos.stagnation_window = 50;
  pc.cg.max_iterations = 10;

  const RunOutcome hybrid = run_method(Method::Hybrid, problem, pc, 11);
  CHECK(hybrid.report.method == "hybrid");
  CHECK(hybrid.report.chaos_evals == 300);
  CHECK(hybrid.report.cg_evals > 0);
  CHECK(hybrid.report.chaos_evals + hybrid.report.cg_evals <= pc.eval_budget);
  CHECK_FALSE(hybrid.report.evals_to_threshold.has_value());
  CHECK(is_valid(hybrid.best));

  const RunOutcome sc = run_method(Method::SingleChaos, problem, pc, 11);
  CHECK(sc.report.chaos_evals == pc.eval_budget);
  CHECK(sc.report.cg_evals == 0);

  const RunOutcome ga = run_method(Method::Ga, problem, pc, 11);
  CHECK(ga.report.chaos_evals == 0);
  CHECK(ga.report.best_cost < std::numeric_limits<double>::infinity());

  const RunOutcome cgo = run_method(Method::CgOnly, problem, pc, 11);
  CHECK(cgo.report.cg_evals > 0);
  CHECK(cgo.report.cg_evals <= pc.eval_budget);

  // Reports are deterministic per (config, seed).
  const RunOutcome hybrid2 = run_method(Method::Hybrid, problem, pc, 11);
  CHECK(hybrid.report.best_cost == hybrid2.report.best_cost);
  CHECK(hybrid.report.history.size() == hybrid2.report.history.size());
}
