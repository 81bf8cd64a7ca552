// cloudopt CLI: optimize a controller, simulate a tuned one, reproduce the
// four-method comparison table, or validate the finite-difference gradients.
//
// Exit codes: 0 success, 1 check failure, 2 config error, 3 evaluation
// failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cloudopt/cloudopt.hpp"

namespace fs = std::filesystem;
using namespace cloudopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitEvalFailure = 3;

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw config_error("cannot create output directory: " + out);
}

int cmd_optimize(const std::string& config_path, std::uint64_t seed, const std::string& out) {
  RunConfig rc = RunConfig::from_file(config_path);
  ensure_out_dir(out);
  RunOutcome outcome = run_method(rc.method, rc.problem, rc.pipeline, seed);
  write_report_json((fs::path(out) / "report.json").string(), outcome.report);
  write_params_json((fs::path(out) / "best_params.json").string(), outcome.best);
  return kExitOk;
}

int cmd_simulate(const std::string& params_path, const std::string& config_path,
                 const std::string& out) {
  RunConfig rc = RunConfig::from_file(config_path);
  ParameterVector params = read_params_json(params_path);
  ensure_out_dir(out);
  EpisodeTrace trace = run_episode(params, rc.problem.plant, rc.problem.sim);
  write_trace_csv((fs::path(out) / "trace.csv").string(), trace);
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out) {
  RunConfig rc = RunConfig::from_file(config_path);
  ensure_out_dir(out);
  std::vector<RunOutcome> outcomes = compare_methods(rc.problem, rc.pipeline, rc.seeds);
  std::vector<OptimizerReport> rows;
  rows.reserve(outcomes.size());
  for (const RunOutcome& oc : outcomes) rows.push_back(oc.report);
  write_table_csv((fs::path(out) / "table.csv").string(), rows);

  std::vector<MethodSummary> summaries;
  for (Method m : all_methods()) {
    std::vector<OptimizerReport> runs;
    for (const OptimizerReport& r : rows)
      if (r.method == method_name(m)) runs.push_back(r);
    summaries.push_back(summarize(method_name(m), runs));
  }
  write_summary_csv((fs::path(out) / "summary.csv").string(), summaries);
  return kExitOk;
}

int cmd_gradcheck(double step, bool inject_sign_flip) {
  constexpr double tolerance = 1e-4;
  bool ok = true;
  for (const GradCheckCase& c : gradcheck_suite()) {
    const GradCheckResult r = run_gradcheck_case(c, step, inject_sign_flip);
    const bool pass = r.max_rel_error <= tolerance;
    ok = ok && pass;
    std::printf("%-20s max_rel_err=%.3e %s\n", r.name.c_str(), r.max_rel_error,
                pass ? "ok" : "FAIL");
  }
  std::printf("gradcheck: %s (step=%.3e, tolerance=%.1e)\n", ok ? "PASS" : "FAIL", step,
              tolerance);
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloud-model controller tuning via hybrid chaos + conjugate gradient"};
  app.require_subcommand(1);

  std::string config_path, params_path, out_dir;
  std::uint64_t seed = 42;
  double gc_step = 1e-5;
  bool gc_flip = false;

  CLI::App* optimize = app.add_subcommand("optimize", "tune a controller and write reports");
  optimize->add_option("--config", config_path, "run configuration file")->required();
  optimize->add_option("--seed", seed, "optimizer seed");
  optimize->add_option("--out", out_dir, "output directory")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run one closed-loop episode");
  simulate->add_option("--params", params_path, "controller parameters (JSON)")->required();
  simulate->add_option("--config", config_path, "run configuration file")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();

  CLI::App* compare = app.add_subcommand("compare", "run the four-method comparison");
  compare->add_option("--config", config_path, "run configuration file")->required();
  compare->add_option("--out", out_dir, "output directory")->required();

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "validate finite-difference gradients");
  gradcheck->add_option("--step", gc_step, "central-difference step");
  gradcheck->add_flag("--inject-sign-flip", gc_flip, "flip one component (self-test hook)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return cmd_optimize(config_path, seed, out_dir);
    if (simulate->parsed()) return cmd_simulate(params_path, config_path, out_dir);
    if (compare->parsed()) return cmd_compare(config_path, out_dir);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_step, gc_flip);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const evaluation_failure& e) {
    std::cerr << "evaluation failure: " << e.what() << "\n";
    return kExitEvalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEvalFailure;
  }
  return kExitOk;
}
