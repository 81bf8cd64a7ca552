// Comparison optimizers: single (unscaled) chaos search, conjugate gradient
// from a random start, and a real-coded genetic algorithm on the same genome
// the chaos decode uses.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cloudopt/cg.hpp"
#include "cloudopt/chaos.hpp"
#include "cloudopt/cloud.hpp"
#include "cloudopt/report.hpp"
#include "cloudopt/rng.hpp"

namespace cloudopt {

// Chaos search with the scaling schedule disabled: global windows throughout,
// integers never frozen, same termination rules.
template <class Objective>
ChaosResult single_chaos(Objective&& objective, const SearchBounds& bounds,
                         const ChaosConfig& cfg) {
  ChaosConfig flat = cfg;
  flat.variable_scaling = false;
  return chaos_search(std::forward<Objective>(objective), bounds, flat);
}

// Uniformly random valid controller within the bounds' caps and ranges.
inline ParameterVector random_params(Rng& rng, const SearchBounds& bounds) {
  const SlotLayout& L = bounds.layout;
  ParameterVector p;
  p.structure = ControllerStructure{rng.uniform_int(1, L.cap_m1), rng.uniform_int(1, L.cap_m2),
                                    rng.uniform_int(1, L.cap_o), bounds.pu};
  for (int i = 0; i < p.structure.m1; ++i)
    p.in1_clouds.push_back({rng.uniform(-1.0, 1.0), rng.uniform(), rng.uniform()});
  for (int j = 0; j < p.structure.m2; ++j)
    p.in2_clouds.push_back({rng.uniform(-1.0, 1.0), rng.uniform(), rng.uniform()});
  for (int h = 0; h < p.structure.o; ++h) p.out_singletons.push_back(rng.uniform(-1.0, 1.0));
  for (int r = 0; r < p.structure.m1 * p.structure.m2; ++r)
    p.rules.entries.push_back(rng.uniform_int(1, p.structure.o));
  p.ku = rng.uniform(0.0, bounds.pu);
  return p;
}

struct CgOnlyResult {
  ParameterVector best;
  OptimizerReport report;
};

// Conjugate gradient from one uniformly random start: random frozen structure
// and rules, CG over the continuous sub-vector with global-range clipping.
template <class Objective>
CgOnlyResult cg_only(Objective&& objective, const SearchBounds& bounds, const CGConfig& cfg,
                     std::uint64_t seed) {
  Rng rng(seed);
  ParameterVector base = random_params(rng, bounds);
  const std::vector<int> slots = continuous_slots(bounds.layout, base.structure);

  std::vector<double> p0, lower, upper;
  p0.reserve(slots.size());
  for (int s : slots) {
    p0.push_back(continuous_value(base, bounds.layout, s));
    const auto [lo, hi] = bounds.slot_range(s);
    lower.push_back(lo);
    upper.push_back(hi);
  }
  CGConfig run_cfg = cfg;
  run_cfg.lower = std::move(lower);
  run_cfg.upper = std::move(upper);

  auto vec_objective = [&](const std::vector<double>& v) {
    ParameterVector q = base;
    for (std::size_t i = 0; i < slots.size(); ++i)
      set_continuous_value(q, bounds.layout, slots[i], v[i]);
    return objective(q);
  };
  CGResult res = cg_refine(vec_objective, std::move(p0), run_cfg);

  ParameterVector best = base;
  for (std::size_t i = 0; i < slots.size(); ++i)
    set_continuous_value(best, bounds.layout, slots[i], res.best[i]);
  res.report.method = "cg-only";
  res.report.seed = seed;
  res.report.best_params = best;
  return {std::move(best), std::move(res.report)};
}

struct GAConfig {
  int population = 40;
  long generations = 2500;
  double crossover_prob = 0.9;
  double mutation_prob = 0.1;            // per gene
  double mutation_sigma_fraction = 0.1;  // sigma = fraction * gene range (range is 1)
  int tournament_size = 2;
  int elitism = 1;
  std::uint64_t seed = 1;
  long max_evaluations = 0;              // 0: population * generations
  double j_stop = 1e-3;
  std::vector<double> init_genome;       // optional warm start for every individual
};

struct GAResult {
  ParameterVector best;
  OptimizerReport report;
};

// Real-coded GA on the alpha genome: tournament selection, arithmetic
// crossover, per-gene Gaussian mutation, elitism. Genomes decode through the
// same bounds as the chaos search, so both searches share one genotype space.
template <class Objective>
GAResult ga_optimize(Objective&& objective, const SearchBounds& bounds, const GAConfig& cfg) {
  if (cfg.population < 2) throw std::invalid_argument("ga_optimize: population must be >= 2");
  if (cfg.tournament_size < 2) throw std::invalid_argument("ga_optimize: tournament must be >= 2");
  if (cfg.elitism < 0 || cfg.elitism >= cfg.population)
    throw std::invalid_argument("ga_optimize: elitism out of range");
  constexpr double gene_lo = 1e-9;
  constexpr double gene_hi = 1.0 - 1e-9;

  const int genes = bounds.layout.total_slots();
  Rng rng(cfg.seed);
  OptimizerReport report;
  report.method = "ga";
  report.seed = cfg.seed;

  const long eval_cap = cfg.max_evaluations > 0
                            ? cfg.max_evaluations
                            : cfg.generations * static_cast<long>(cfg.population);
  report.budget = eval_cap;

  std::vector<std::vector<double>> pop(cfg.population);
  for (auto& g : pop) {
    if (!cfg.init_genome.empty()) {
      if (static_cast<int>(cfg.init_genome.size()) != genes)
        throw std::invalid_argument("ga_optimize: init genome size mismatch");
      g = cfg.init_genome;
    } else {
      g.resize(genes);
      for (double& x : g) x = std::clamp(rng.uniform(), gene_lo, gene_hi);
    }
  }

  long evals = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> best_genome;
  auto evaluate = [&](const std::vector<double>& g) {
    const double c = objective(decode(g, bounds));
    ++evals;
    if (c < best_cost) {
      best_cost = c;
      best_genome = g;
      report.history.push_back({evals, c});
    }
    return c;
  };

  std::vector<double> fitness(cfg.population);
  for (int i = 0; i < cfg.population; ++i) fitness[i] = evaluate(pop[i]);

  for (long gen = 1; gen <= cfg.generations; ++gen) {
    if (best_cost <= cfg.j_stop) break;
    if (evals + (cfg.population - cfg.elitism) > eval_cap) break;

    std::vector<int> order(cfg.population);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] < fitness[b]; });

    std::vector<std::vector<double>> next;
    std::vector<double> next_fitness;
    next.reserve(cfg.population);
    for (int e = 0; e < cfg.elitism; ++e) {
      next.push_back(pop[order[e]]);
      next_fitness.push_back(fitness[order[e]]);
    }
    auto tournament = [&]() -> const std::vector<double>& {
      int winner = rng.uniform_int(0, cfg.population - 1);
      for (int t = 1; t < cfg.tournament_size; ++t) {
        const int c = rng.uniform_int(0, cfg.population - 1);
        if (fitness[c] < fitness[winner]) winner = c;
      }
      return pop[winner];
    };
    while (static_cast<int>(next.size()) < cfg.population) {
      const std::vector<double>& p1 = tournament();
      const std::vector<double>& p2 = tournament();
      std::vector<double> child(genes);
      if (rng.uniform() < cfg.crossover_prob) {
        const double t = rng.uniform();
        for (int i = 0; i < genes; ++i) child[i] = t * p1[i] + (1.0 - t) * p2[i];
      } else {
        child = p1;
      }
      for (int i = 0; i < genes; ++i)
        if (rng.uniform() < cfg.mutation_prob)
          child[i] += rng.gaussian(0.0, cfg.mutation_sigma_fraction);
      for (double& x : child) x = std::clamp(x, gene_lo, gene_hi);
      next_fitness.push_back(evaluate(child));
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    fitness = std::move(next_fitness);
  }

  report.best_cost = best_cost;
  if (best_cost <= cfg.j_stop)
    for (const EvalRecord& rec : report.history)
      if (rec.best <= cfg.j_stop) {
        report.evals_to_threshold = rec.index;
        break;
      }
  GAResult out;
  out.best = best_genome.empty() ? ParameterVector{} : decode(best_genome, bounds);
  report.best_params = out.best;
  out.report = std::move(report);
  return out;
}

}  // namespace cloudopt
