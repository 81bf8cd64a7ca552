// Discrete-time plant, closed-loop episode simulation, and the two cost
// functionals used by the optimizers: a time-weighted absolute-error index
// (j1) and a summed squared-error index (j2).
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "cloudopt/cloud.hpp"
#include "cloudopt/rng.hpp"

namespace cloudopt {

constexpr double kDivergencePenalty = 1e6;

struct PlantModel {
  std::vector<double> a;        // output-history coefficients, newest first
  std::vector<double> b;        // input-history coefficients, newest first
  double noise_std = 0.0;       // white-noise standard deviation
  double output_clamp = 1e3;    // divergence guard bound
};

// Step reference: r(k) = level for k >= start, 0 before.
struct StepReference {
  double level = 1.0;
  int start = 1;

  double at(int k) const { return k >= start ? level : 0.0; }
};

struct SimConfig {
  int horizon = 200;
  double dt = 0.1;
  StepReference reference;
  std::uint64_t noise_seed = 0;
  std::uint64_t droplet_seed = 0;
};

struct TraceRow {
  int k;
  double r, y, u, e;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  bool diverged = false;
};

struct PlantStep {
  double y;
  bool clamped;
};

// One difference-equation step. Histories hold the most recent values,
// newest first, zero-padded at start-up; sizes must match the coefficient
// lists. Output is clamped to +-output_clamp and the clamp is reported.
inline PlantStep plant_step(const PlantModel& model, std::span<const double> y_hist,
                            std::span<const double> u_hist, double noise) {
  if (y_hist.size() != model.a.size() || u_hist.size() != model.b.size())
    throw std::invalid_argument("plant_step: history length mismatch");
  double y = noise;
  for (std::size_t i = 0; i < model.a.size(); ++i) y += model.a[i] * y_hist[i];
  for (std::size_t j = 0; j < model.b.size(); ++j) y += model.b[j] * u_hist[j];
  if (y > model.output_clamp) return {model.output_clamp, true};
  if (y < -model.output_clamp) return {-model.output_clamp, true};
  return {y, false};
}

// Closed loop: at step k the controller sees e(k) = r(k) - y where y is the
// plant output observed so far (0 at start-up), acts with u(k), and the plant
// advances one step. Rows record the observed state, so e = r - y holds on
// every row. Fully deterministic given the two stream seeds.
inline EpisodeTrace run_episode(const ParameterVector& params, const PlantModel& model,
                                const SimConfig& cfg) {
  if (cfg.horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
  Rng noise_stream(cfg.noise_seed);
  Rng droplet_stream(cfg.droplet_seed);
  std::vector<double> y_hist(model.a.size(), 0.0);
  std::vector<double> u_hist(model.b.size(), 0.0);
  EpisodeTrace trace;
  trace.rows.reserve(cfg.horizon);
  double y_observed = 0.0;
  double e_prev = 0.0;
  for (int k = 1; k <= cfg.horizon; ++k) {
    const double r = cfg.reference.at(k);
    const double e = r - y_observed;
    const double de = e - e_prev;
    const double u = infer(params, e, de, droplet_stream);
    trace.rows.push_back({k, r, y_observed, u, e});
    const double noise = model.noise_std * noise_stream.gaussian();
    const PlantStep step = plant_step(model, y_hist, u_hist, noise);
    if (step.clamped) trace.diverged = true;
    for (std::size_t i = y_hist.size(); i-- > 1;) y_hist[i] = y_hist[i - 1];
    if (!y_hist.empty()) y_hist[0] = step.y;
    for (std::size_t i = u_hist.size(); i-- > 1;) u_hist[i] = u_hist[i - 1];
    if (!u_hist.empty()) u_hist[0] = u;
    y_observed = step.y;
    e_prev = e;
  }
  return trace;
}

// Sum of k^2 * |e(k)| * dt; diverged traces carry an additive penalty so the
// optimizers rank them strictly worse than any bounded response.
inline double cost_j1(const EpisodeTrace& trace, double dt) {
  if (trace.rows.empty()) throw std::invalid_argument("cost_j1: empty trace");
  double sum = 0.0;
  for (const TraceRow& row : trace.rows) {
    const double k = static_cast<double>(row.k);
    sum += k * k * std::abs(row.e) * dt;
  }
  return trace.diverged ? sum + kDivergencePenalty : sum;
}

// Sum of e(k)^2 / 2 over the episode, same divergence penalty as cost_j1.
inline double cost_j2_total(const EpisodeTrace& trace) {
  if (trace.rows.empty()) throw std::invalid_argument("cost_j2_total: empty trace");
  double sum = 0.0;
  for (const TraceRow& row : trace.rows) sum += 0.5 * row.e * row.e;
  return trace.diverged ? sum + kDivergencePenalty : sum;
}

}  // namespace cloudopt
