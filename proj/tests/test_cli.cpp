// Integration tests that drive the built cloudopt binary end to end.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cloudopt/io.hpp"

using namespace cloudopt;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return CLOUDOPT_CLI_PATH; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cloudopt_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string(cli_path()) + " " + args + " > " + stdout_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tiny_config() {
  return "plant.a = 1.2 -0.4\n"
         "plant.b = 0.5\n"
         "plant.noise_std = 0.02\n"
         "sim.horizon = 25\n"
         "sim.dt = 0.1\n"
         "search.max_m1 = 2\n"
         "search.max_m2 = 2\n"
         "search.max_o = 3\n"
         "search.pu = 5\n"
         "objective.threshold = 0.02\n"
         "objective.eval_budget = 400\n"
         "chaos.max_iterations = 200\n"
         "chaos.stage0 = 80\n"
         "chaos.stagnation_window = 40\n"
         "cg.max_iterations = 5\n"
         "seeds = 1 2\n";
}

}  // namespace

TEST_CASE("optimize writes deterministic artifacts") {
  TempDir dir;
  const std::string cfg = dir.file("run.cfg");
  write_text(cfg, tiny_config());

  const std::string out1 = dir.file("out1");
  const std::string out2 = dir.file("out2");
  CHECK(run("optimize --config " + cfg + " --seed 42 --out " + out1) == 0);
  CHECK(run("optimize --config " + cfg + " --seed 42 --out " + out2) == 0);
  CHECK(read_text(out1 + "/report.json") == read_text(out2 + "/report.json"));
  CHECK(read_text(out1 + "/best_params.json") == read_text(out2 + "/best_params.json"));

  // The emitted best params parse back as a valid controller.
  CHECK_NOTHROW(read_params_json(out1 + "/best_params.json"));
}

TEST_CASE("optimize exit codes on config problems") {
  TempDir dir;
  CHECK(run("optimize --config " + dir.file("absent.cfg") + " --seed 1 --out " +
            dir.file("out")) == 2);

  const std::string bad = dir.file("bad.cfg");
  write_text(bad, "no equals sign here\n");
  CHECK(run("optimize --config " + bad + " --seed 1 --out " + dir.file("out")) == 2);
}

TEST_CASE("optimize with a one-evaluation budget reports exhaustion") {
  TempDir dir;
  const std::string cfg = dir.file("run.cfg");
  std::string text = tiny_config();
  text.replace(text.find("objective.eval_budget = 400"),
               std::string("objective.eval_budget = 400").size(),
               "objective.eval_budget = 1");
  write_text(cfg, text);
  const std::string out = dir.file("out");
  CHECK(run("optimize --config " + cfg + " --seed 3 --out " + out) == 0);
  const std::string report = read_text(out + "/report.json");
  const bool exhausted =
      report.find("\"evals_to_threshold\": \"budget-exhausted\"") != std::string::npos;
  const bool first_hit = report.find("\"evals_to_threshold\": 1") != std::string::npos;
  CHECK((exhausted || first_hit));
}

TEST_CASE("simulate emits the expected trace") {
  TempDir dir;
  const std::string cfg = dir.file("run.cfg");
  std::string text = tiny_config();
  text.replace(text.find("plant.noise_std = 0.02"),
               std::string("plant.noise_std = 0.02").size(), "plant.noise_std = 0");
  text.replace(text.find("sim.horizon = 25"), std::string("sim.horizon = 25").size(),
               "sim.horizon = 200");
  write_text(cfg, text);

  ParameterVector p;
  p.structure = {1, 1, 1, 5.0};
  p.in1_clouds = {{0.0, 0.5, 0.0}};
  p.in2_clouds = {{0.0, 0.5, 0.0}};
  p.out_singletons = {0.4};
  p.rules.entries = {1};
  p.ku = 0.0;
  const std::string params = dir.file("params.json");
  write_params_json(params, p);

  const std::string out = dir.file("out");
  CHECK(run("simulate --params " + params + " --config " + cfg + " --out " + out) == 0);
  const std::string trace = read_text(out + "/trace.csv");

  // Header plus one line per step, LF endings only.
  CHECK(trace.find('\r') == std::string::npos);
  long lines = 0;
  for (char c : trace) lines += c == '\n';
  CHECK(lines == 201);
  CHECK(trace.rfind("k,r,y,u,e\n", 0) == 0);

  // Zero gain, zero noise: the y column stays zero.
  std::istringstream ss(trace);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');  // k
    std::getline(row, field, ',');  // r
    std::getline(row, field, ',');  // y
    CHECK(field == "0");
  }

  const std::string out2 = dir.file("out2");
  CHECK(run("simulate --params " + params + " --config " + cfg + " --out " + out2) == 0);
  CHECK(read_text(out + "/trace.csv") == read_text(out2 + "/trace.csv"));
}

TEST_CASE("simulate rejects invalid params with exit 2") {
  TempDir dir;
  const std::string cfg = dir.file("run.cfg");
  write_text(cfg, tiny_config());
  const std::string params = dir.file("params.json");
  write_text(params, "{\"structure\": {\"m1\": 0}}");
  CHECK(run("simulate --params " + params + " --config " + cfg + " --out " + dir.file("out")) ==
        2);
}

TEST_CASE("compare emits one row per method and seed") {
  TempDir dir;
  const std::string cfg = dir.file("run.cfg");
  std::string text = tiny_config();
  text.replace(text.find("seeds = 1 2"), std::string("seeds = 1 2").size(), "seeds = 5");
  write_text(cfg, text);
  const std::string out = dir.file("out");
  CHECK(run("compare --config " + cfg + " --out " + out) == 0);

  const std::string table = read_text(out + "/table.csv");
  long lines = 0;
  for (char c : table) lines += c == '\n';
  CHECK(lines == 5);  // header + 4 methods x 1 seed
  CHECK(table.find("single-chaos,5,") != std::string::npos);
  CHECK(table.find("cg-only,5,") != std::string::npos);
  CHECK(table.find("ga,5,") != std::string::npos);
  CHECK(table.find("hybrid,5,") != std::string::npos);

  const std::string summary = read_text(out + "/summary.csv");
  CHECK(summary.rfind("method,median_evals,success_rate\n", 0) == 0);

  const std::string out2 = dir.file("out2");
  CHECK(run("compare --config " + cfg + " --out " + out2) == 0);
  CHECK(read_text(out + "/table.csv") == read_text(out2 + "/table.csv"));
  CHECK(read_text(out + "/summary.csv") == read_text(out2 + "/summary.csv"));
}

TEST_CASE("gradcheck exit codes and step sensitivity") {
  TempDir dir;
  const std::string log1 = dir.file("gc1.txt");
  CHECK(run("gradcheck", log1) == 0);
  CHECK(read_text(log1).find("gradcheck: PASS") != std::string::npos);

  CHECK(run("gradcheck --inject-sign-flip", dir.file("gc2.txt")) == 1);

  const std::string coarse_log = dir.file("gc3.txt");
  CHECK(run("gradcheck --step 0.1", coarse_log) == 1);
  // The coarse step reports visibly larger errors than the reference step.
  auto max_err = [](const std::string& text) {
    double worst = 0.0;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      const auto pos = line.find("max_rel_err=");
      if (pos == std::string::npos) continue;
      worst = std::max(worst, std::stod(line.substr(pos + 12)));
    }
    return worst;
  };
  CHECK(max_err(read_text(coarse_log)) > max_err(read_text(log1)));
}
