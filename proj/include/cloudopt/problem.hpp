// Controller-tuning problem and the method pipeline. The hybrid method runs
// the scaled chaos search on the time-weighted index, then refines the frozen
// incumbent's continuous parameters with conjugate gradient on the squared
// index. All methods share one counting wrapper and, per run seed, one pair
// of episode streams, so evaluations-to-threshold is directly comparable.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cloudopt/baselines.hpp"
#include "cloudopt/cg.hpp"
#include "cloudopt/chaos.hpp"
#include "cloudopt/plant.hpp"
#include "cloudopt/report.hpp"

namespace cloudopt {

enum class Method { Hybrid, SingleChaos, CgOnly, Ga };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Hybrid: return "hybrid";
    case Method::SingleChaos: return "single-chaos";
    case Method::CgOnly: return "cg-only";
    case Method::Ga: return "ga";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "hybrid") return Method::Hybrid;
  if (s == "single-chaos") return Method::SingleChaos;
  if (s == "cg-only") return Method::CgOnly;
  if (s == "ga") return Method::Ga;
  throw std::invalid_argument("unknown method: " + s);
}

// Methods ordered as the comparison table lists them.
inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> ms = {Method::SingleChaos, Method::CgOnly, Method::Ga,
                                         Method::Hybrid};
  return ms;
}

struct TuningProblem {
  PlantModel plant;
  SimConfig sim;        // holds the base episode seeds
  SearchBounds bounds;
  bool normalize = true;

  // Scale that turns the time-weighted index into a per-run comparable
  // number: horizon * dt * (largest step weight).
  double j1_scale() const {
    const double T = static_cast<double>(sim.horizon);
    return T * sim.dt * T * T;
  }

  double eval_j1(const ParameterVector& p) const {
    const EpisodeTrace tr = run_episode(p, plant, sim);
    const double j = cost_j1(tr, sim.dt);
    return normalize ? j / j1_scale() : j;
  }

  std::pair<double, double> eval_both(const ParameterVector& p) const {
    const EpisodeTrace tr = run_episode(p, plant, sim);
    const double j1 = cost_j1(tr, sim.dt);
    return {normalize ? j1 / j1_scale() : j1, cost_j2_total(tr)};
  }
};

struct PipelineConfig {
  double threshold = 1e-3;   // on the (optionally normalized) j1 index
  long eval_budget = 20000;  // total objective evaluations per run
  ChaosConfig chaos;         // max_iterations caps the hybrid chaos phase
  CGConfig cg;
  GAConfig ga;
};

struct RunOutcome {
  OptimizerReport report;
  ParameterVector best;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t run) {
  std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL + run * 0xbf58476d1ce4e5b9ULL);
  return splitmix64(s);
}

}  // namespace detail

// Run one method for one seed. The run seed drives the optimizer; the episode
// streams derive from (config base seeds, run seed) only, so every method
// sees the same plant noise for a given seed.
template <class ProblemT = TuningProblem>
RunOutcome run_method(Method method, const ProblemT& problem0, const PipelineConfig& pc,
                      std::uint64_t run_seed) {
  if (pc.eval_budget < 1) throw std::invalid_argument("run_method: budget must be >= 1");
  ProblemT problem = problem0;
  problem.sim.noise_seed = detail::mix_seed(problem0.sim.noise_seed, run_seed);
  problem.sim.droplet_seed = detail::mix_seed(problem0.sim.droplet_seed, run_seed);

  EvalCounter counter(pc.threshold, pc.eval_budget);
  ParameterVector best_params;
  double best_j1 = std::numeric_limits<double>::infinity();
  auto record = [&](const ParameterVector& p, double j1) {
    counter.record(j1);
    if (j1 < best_j1) {
      best_j1 = j1;
      best_params = p;
    }
  };
  auto j1_objective = [&](const ParameterVector& p) {
    const double j = problem.eval_j1(p);
    record(p, j);
    return j;
  };
  // Records the comparison index, hands the squared index to the minimizer.
  auto j2_objective = [&](const ParameterVector& p) {
    const auto [j1, j2] = problem.eval_both(p);
    record(p, j1);
    return j2;
  };

  OptimizerReport report;
  switch (method) {
    case Method::SingleChaos: {
      ChaosConfig cc = pc.chaos;
      cc.seed = run_seed;
      cc.max_iterations = pc.eval_budget;
      cc.j_stop = pc.threshold;
      cc.variable_scaling = false;
      auto res = single_chaos(j1_objective, problem.bounds, cc);
      report.chaos_evals = counter.count();
      report.contraction_events = std::move(res.report.contraction_events);
      break;
    }
    case Method::Hybrid: {
      ChaosConfig cc = pc.chaos;
      cc.seed = run_seed;
      cc.max_iterations = std::min(pc.chaos.max_iterations, pc.eval_budget);
      cc.j_stop = pc.threshold;
      cc.variable_scaling = true;
      auto chaos_res = chaos_search(j1_objective, problem.bounds, cc);
      report.chaos_evals = counter.count();
      report.contraction_events = std::move(chaos_res.report.contraction_events);
      if (!counter.crossed() && !counter.exhausted()) {
        const ParameterVector base = best_params;
        const std::vector<int> slots = continuous_slots(problem.bounds.layout, base.structure);
        CGConfig gc = pc.cg;
        gc.max_evaluations = pc.eval_budget - counter.count();
        gc.should_stop = [&]() { return counter.crossed() || counter.exhausted(); };
        gc.lower.clear();
        gc.upper.clear();
        std::vector<double> p0;
        for (int s : slots) {
          p0.push_back(continuous_value(base, problem.bounds.layout, s));
          const auto [lo, hi] = problem.bounds.slot_range(s);
          gc.lower.push_back(lo);
          gc.upper.push_back(hi);
        }
        auto vec_objective = [&](const std::vector<double>& v) {
          ParameterVector q = base;
          for (std::size_t i = 0; i < slots.size(); ++i)
            set_continuous_value(q, problem.bounds.layout, slots[i], v[i]);
          return j2_objective(q);
        };
        cg_refine(vec_objective, std::move(p0), gc);
      }
      report.cg_evals = counter.count() - report.chaos_evals;
      break;
    }
    case Method::CgOnly: {
      CGConfig gc = pc.cg;
      gc.max_evaluations = pc.eval_budget;
      cg_only(j2_objective, problem.bounds, gc, run_seed);
      report.cg_evals = counter.count();
      break;
    }
    case Method::Ga: {
      GAConfig gc = pc.ga;
      gc.seed = run_seed;
      gc.max_evaluations = pc.eval_budget;
      gc.j_stop = pc.threshold;
      gc.generations = std::numeric_limits<long>::max() / (2 * gc.population);
      ga_optimize(j1_objective, problem.bounds, gc);
      break;
    }
  }

  report.method = method_name(method);
  report.seed = run_seed;
  report.budget = pc.eval_budget;
  report.best_cost = counter.best();
  report.evals_to_threshold = counter.first_crossing();
  report.history = counter.history();
  report.best_params = best_params;
  return {std::move(report), std::move(best_params)};
}

// All four methods over all seeds, method-major, fixed order.
inline std::vector<RunOutcome> compare_methods(const TuningProblem& problem,
                                               const PipelineConfig& pc,
                                               const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("compare_methods: need at least one seed");
  std::vector<RunOutcome> out;
  out.reserve(all_methods().size() * seeds.size());
  for (Method m : all_methods())
    for (std::uint64_t s : seeds) out.push_back(run_method(m, problem, pc, s));
  return out;
}

}  // namespace cloudopt
