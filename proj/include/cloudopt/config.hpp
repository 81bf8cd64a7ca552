// Flat `key = value` run configuration with dotted section prefixes.
// Unknown keys are rejected so typos fail loudly instead of silently falling
// back to defaults.
#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudopt/problem.hpp"

namespace cloudopt {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

class ConfigMap {
 public:
  static ConfigMap load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = detail::trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty()) throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw config_error(path + ":" + std::to_string(lineno) + ": duplicate key " + key);
      cfg.values_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    return parse<double>(key, fallback);
  }

  long get_long(const std::string& key, long fallback) { return parse<long>(key, fallback); }

  int get_int(const std::string& key, int fallback) { return parse<int>(key, fallback); }

  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) {
    return parse<std::uint64_t>(key, fallback);
  }

  bool get_bool(const std::string& key, bool fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw config_error("config key " + key + ": expected true/false, got '" + it->second + "'");
  }

  template <class T>
  std::vector<T> get_list(const std::string& key, std::vector<T> fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<T> out;
    std::string item;
    std::istringstream ss(it->second);
    while (ss >> item) {
      if (!item.empty() && item.back() == ',') item.pop_back();
      if (item.empty()) continue;
      out.push_back(parse_value<T>(key, item));
    }
    return out;
  }

  // Call after reading every supported key; leftovers are schema errors.
  void reject_unknown() const {
    for (const auto& [key, value] : values_)
      if (!used_.count(key)) throw config_error("unknown config key: " + key);
  }

 private:
  template <class T>
  T parse(const std::string& key, T fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_value<T>(key, it->second);
  }

  template <class T>
  static T parse_value(const std::string& key, const std::string& text) {
    std::istringstream ss(text);
    T v;
    ss >> v;
    if (ss.fail() || !(ss >> std::ws).eof())
      throw config_error("config key " + key + ": cannot parse '" + text + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

struct RunConfig {
  TuningProblem problem;
  PipelineConfig pipeline;
  Method method = Method::Hybrid;
  std::vector<std::uint64_t> seeds;

  static RunConfig from_file(const std::string& path) {
    ConfigMap cfg = ConfigMap::load(path);
    RunConfig rc;

    rc.problem.plant.a = cfg.get_list<double>("plant.a", {1.2, -0.4});
    rc.problem.plant.b = cfg.get_list<double>("plant.b", {0.5});
    rc.problem.plant.noise_std = cfg.get_double("plant.noise_std", 0.05);
    rc.problem.plant.output_clamp = cfg.get_double("plant.output_clamp", 1e3);
    if (rc.problem.plant.a.empty() || rc.problem.plant.b.empty())
      throw config_error("plant.a and plant.b need at least one coefficient");
    if (rc.problem.plant.noise_std < 0.0) throw config_error("plant.noise_std must be >= 0");
    if (!(rc.problem.plant.output_clamp > 0.0))
      throw config_error("plant.output_clamp must be > 0");

    rc.problem.sim.horizon = cfg.get_int("sim.horizon", 200);
    rc.problem.sim.dt = cfg.get_double("sim.dt", 0.1);
    rc.problem.sim.reference.level = cfg.get_double("sim.ref_level", 1.0);
    rc.problem.sim.reference.start = cfg.get_int("sim.ref_start", 1);
    rc.problem.sim.noise_seed = cfg.get_seed("sim.noise_seed", 2024);
    rc.problem.sim.droplet_seed = cfg.get_seed("sim.droplet_seed", 7);
    if (rc.problem.sim.horizon < 1) throw config_error("sim.horizon must be >= 1");
    if (!(rc.problem.sim.dt > 0.0)) throw config_error("sim.dt must be > 0");

    SlotLayout layout;
    layout.cap_m1 = cfg.get_int("search.max_m1", kMaxClouds);
    layout.cap_m2 = cfg.get_int("search.max_m2", kMaxClouds);
    layout.cap_o = cfg.get_int("search.max_o", kMaxClouds);
    const double pu = cfg.get_double("search.pu", 10.0);
    const bool integer_ku = cfg.get_bool("search.integer_ku", false);
    auto check_cap = [](int cap, const char* name) {
      if (cap < 1 || cap > kMaxClouds)
        throw config_error(std::string(name) + " must lie in [1, 20]");
    };
    check_cap(layout.cap_m1, "search.max_m1");
    check_cap(layout.cap_m2, "search.max_m2");
    check_cap(layout.cap_o, "search.max_o");
    if (!(pu > 0.0)) throw config_error("search.pu must be > 0");
    rc.problem.bounds = SearchBounds::full(layout, pu, integer_ku);

    rc.problem.normalize = cfg.get_bool("objective.normalized", true);
    rc.pipeline.threshold = cfg.get_double("objective.threshold", 1e-3);
    rc.pipeline.eval_budget = cfg.get_long("objective.eval_budget", 20000);
    if (rc.pipeline.eval_budget < 1) throw config_error("objective.eval_budget must be >= 1");

    rc.pipeline.chaos.max_iterations = cfg.get_long("chaos.max_iterations", 2000);
    rc.pipeline.chaos.stage0_iterations = cfg.get_long("chaos.stage0", 500);
    rc.pipeline.chaos.stagnation_window = cfg.get_long("chaos.stagnation_window", 100);
    rc.pipeline.chaos.contraction_lambda = cfg.get_double("chaos.lambda", 0.5);
    rc.pipeline.chaos.min_radius = cfg.get_double("chaos.min_radius", 1e-3);
    if (rc.pipeline.chaos.max_iterations < 1)
      throw config_error("chaos.max_iterations must be >= 1");
    if (!(rc.pipeline.chaos.contraction_lambda > 0.0 &&
          rc.pipeline.chaos.contraction_lambda < 1.0))
      throw config_error("chaos.lambda must lie in (0, 1)");
    if (!(rc.pipeline.chaos.min_radius > 0.0)) throw config_error("chaos.min_radius must be > 0");

    rc.pipeline.cg.max_iterations = cfg.get_int("cg.max_iterations", 60);
    rc.pipeline.cg.fd_step = cfg.get_double("cg.fd_step", 1e-5);
    rc.pipeline.cg.grad_tolerance = cfg.get_double("cg.grad_tolerance", 1e-6);
    rc.pipeline.cg.line_search_tolerance = cfg.get_double("cg.line_search_tolerance", 1e-6);
    rc.pipeline.cg.restart_period = cfg.get_int("cg.restart_period", 0);
    if (!(rc.pipeline.cg.fd_step > 0.0)) throw config_error("cg.fd_step must be > 0");
    if (!(rc.pipeline.cg.grad_tolerance > 0.0))
      throw config_error("cg.grad_tolerance must be > 0");
    if (!(rc.pipeline.cg.line_search_tolerance > 0.0))
      throw config_error("cg.line_search_tolerance must be > 0");

    rc.pipeline.ga.population = cfg.get_int("ga.population", 40);
    rc.pipeline.ga.crossover_prob = cfg.get_double("ga.crossover_prob", 0.9);
    rc.pipeline.ga.mutation_prob = cfg.get_double("ga.mutation_prob", 0.1);
    rc.pipeline.ga.mutation_sigma_fraction = cfg.get_double("ga.mutation_sigma_fraction", 0.1);
    rc.pipeline.ga.tournament_size = cfg.get_int("ga.tournament_size", 2);
    rc.pipeline.ga.elitism = cfg.get_int("ga.elitism", 1);
    if (rc.pipeline.ga.population < 2) throw config_error("ga.population must be >= 2");
    auto check_prob = [](double p, const char* name) {
      if (p < 0.0 || p > 1.0) throw config_error(std::string(name) + " must lie in [0, 1]");
    };
    check_prob(rc.pipeline.ga.crossover_prob, "ga.crossover_prob");
    check_prob(rc.pipeline.ga.mutation_prob, "ga.mutation_prob");
    if (!(rc.pipeline.ga.mutation_sigma_fraction > 0.0))
      throw config_error("ga.mutation_sigma_fraction must be > 0");
    if (rc.pipeline.ga.tournament_size < 2)
      throw config_error("ga.tournament_size must be >= 2");
    if (rc.pipeline.ga.elitism < 0 || rc.pipeline.ga.elitism >= rc.pipeline.ga.population)
      throw config_error("ga.elitism must lie in [0, population)");

    try {
      rc.method = parse_method(cfg.get_string("method", "hybrid"));
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
    rc.seeds = cfg.get_list<std::uint64_t>("seeds", {1});
    if (rc.seeds.empty()) throw config_error("seeds must list at least one seed");

    cfg.reject_unknown();
    return rc;
  }
};

}  // namespace cloudopt
