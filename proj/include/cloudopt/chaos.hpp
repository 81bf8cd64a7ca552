// Parallel variable-scaling-rate chaos search over the mixed
// integer/continuous controller parameter space.
//
// One logistic trajectory per parameter slot drives the sampling. The slot
// pool is sized for the capped structure, and only the prefix selected by the
// decoded (m1, m2, o) is active, so the search dimension never changes
// mid-run. Integer slots map through value = round(range * alpha); continuous
// slots map through per-slot windows (center, radius) that start at the full
// global range and contract around the incumbent when the search stagnates.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cloudopt/cloud.hpp"
#include "cloudopt/report.hpp"
#include "cloudopt/rng.hpp"

namespace cloudopt {

// Slot count for a structure: 3 descriptor fields per input cloud, one per
// output singleton, the rule table, plus m1, m2, o and ku.
inline int gamma_count(const ControllerStructure& s) {
  return 3 * s.m1 + 3 * s.m2 + s.o + 4 + s.m1 * s.m2;
}

// Fixed slot indexing for a capped structure. Slots 0..3 are m1, m2, o, ku;
// cloud fields, singletons and rules follow in blocks with cap-sized strides
// so a slot's meaning is independent of the currently decoded structure.
struct SlotLayout {
  int cap_m1 = kMaxClouds;
  int cap_m2 = kMaxClouds;
  int cap_o = kMaxClouds;

  static constexpr int kM1 = 0;
  static constexpr int kM2 = 1;
  static constexpr int kO = 2;
  static constexpr int kKu = 3;

  int in1_slot(int cloud, int field) const { return 4 + 3 * cloud + field; }
  int in2_slot(int cloud, int field) const { return 4 + 3 * cap_m1 + 3 * cloud + field; }
  int singleton_slot(int h) const { return 4 + 3 * (cap_m1 + cap_m2) + h; }
  int rules_begin() const { return 4 + 3 * (cap_m1 + cap_m2) + cap_o; }
  int rule_slot(int i, int j) const { return rules_begin() + i * cap_m2 + j; }
  int total_slots() const { return rules_begin() + cap_m1 * cap_m2; }
};

enum class SlotKind { M1, M2, O, Ku, Ex, EnHe, Singleton, Rule };

// Per-slot carrier windows plus the integer freeze state.
class SearchBounds {
 public:
  struct Window {
    double center;
    double radius;
  };

  SlotLayout layout;
  double pu = 1.0;
  bool integer_ku = false;  // round the decoded gain to the nearest integer

  bool structure_frozen = false;
  int frozen_m1 = 0, frozen_m2 = 0, frozen_o = 0;
  std::vector<int> frozen_rules;  // optional: pins the rule table when non-empty

  static SearchBounds full(const SlotLayout& lay, double pu_value, bool integer_ku_flag = false) {
    SearchBounds b;
    b.layout = lay;
    b.pu = pu_value;
    b.integer_ku = integer_ku_flag;
    b.windows_.resize(lay.total_slots(), Window{0.0, 0.0});
    for (int s = 0; s < lay.total_slots(); ++s) {
      if (!b.is_continuous(s)) continue;
      const auto [lo, hi] = b.slot_range(s);
      b.windows_[s] = Window{0.5 * (lo + hi), 0.5 * (hi - lo)};
    }
    return b;
  }

  SlotKind kind(int slot) const {
    if (slot == SlotLayout::kM1) return SlotKind::M1;
    if (slot == SlotLayout::kM2) return SlotKind::M2;
    if (slot == SlotLayout::kO) return SlotKind::O;
    if (slot == SlotLayout::kKu) return SlotKind::Ku;
    if (slot >= layout.rules_begin()) return SlotKind::Rule;
    if (slot >= layout.singleton_slot(0)) return SlotKind::Singleton;
    const int field = (slot - 4) % 3;
    return field == 0 ? SlotKind::Ex : SlotKind::EnHe;
  }

  bool is_continuous(int slot) const {
    const SlotKind k = kind(slot);
    return k == SlotKind::Ex || k == SlotKind::EnHe || k == SlotKind::Singleton ||
           k == SlotKind::Ku;
  }

  std::pair<double, double> slot_range(int slot) const {
    switch (kind(slot)) {
      case SlotKind::Ex:
      case SlotKind::Singleton:
        return {-1.0, 1.0};
      case SlotKind::EnHe:
        return {0.0, 1.0};
      case SlotKind::Ku:
        return {0.0, pu};
      default:
        throw std::invalid_argument("slot_range: slot is not continuous");
    }
  }

  // Ex-type slots run downward in alpha (alpha = 0 maps to the +1 end),
  // matching the full-range affine decode of each slot type.
  double orientation(int slot) const {
    const SlotKind k = kind(slot);
    return (k == SlotKind::Ex || k == SlotKind::Singleton) ? -1.0 : 1.0;
  }

  double decode_continuous(int slot, double alpha) const {
    const auto [lo, hi] = slot_range(slot);
    const Window& w = windows_[slot];
    const double v = w.center + orientation(slot) * (2.0 * alpha - 1.0) * w.radius;
    return std::clamp(v, lo, hi);
  }

  const Window& window(int slot) const { return windows_[slot]; }

  void set_window(int slot, Window w) { windows_[slot] = w; }

  double max_radius() const {
    double m = 0.0;
    for (int s = 0; s < layout.total_slots(); ++s)
      if (is_continuous(s)) m = std::max(m, windows_[s].radius);
    return m;
  }

 private:
  std::vector<Window> windows_;
};

// Structure counts map through the full-universe rule round(20 * alpha) and
// then clamp to the configured cap, so capping narrows the range without
// reshaping the carrier map.
inline int decode_structure_slot(double alpha, int cap) {
  const long v = std::lround(kMaxClouds * alpha);
  return static_cast<int>(std::clamp(v, 1L, static_cast<long>(cap)));
}

// Decode a full slot pool into a valid ParameterVector. Structure first, then
// the active prefix of continuous slots, rules, and the gain; every value is
// clipped to its global range so no pool state can violate an invariant.
inline ParameterVector decode(std::span<const double> alphas, const SearchBounds& b) {
  const SlotLayout& L = b.layout;
  if (static_cast<int>(alphas.size()) != L.total_slots())
    throw std::invalid_argument("decode: pool size does not match layout");
  int m1, m2, o;
  if (b.structure_frozen) {
    m1 = b.frozen_m1;
    m2 = b.frozen_m2;
    o = b.frozen_o;
  } else {
    m1 = decode_structure_slot(alphas[SlotLayout::kM1], L.cap_m1);
    m2 = decode_structure_slot(alphas[SlotLayout::kM2], L.cap_m2);
    o = decode_structure_slot(alphas[SlotLayout::kO], L.cap_o);
  }
  ParameterVector p;
  p.structure = ControllerStructure{m1, m2, o, b.pu};
  p.in1_clouds.reserve(m1);
  for (int i = 0; i < m1; ++i)
    p.in1_clouds.push_back({b.decode_continuous(L.in1_slot(i, 0), alphas[L.in1_slot(i, 0)]),
                            b.decode_continuous(L.in1_slot(i, 1), alphas[L.in1_slot(i, 1)]),
                            b.decode_continuous(L.in1_slot(i, 2), alphas[L.in1_slot(i, 2)])});
  p.in2_clouds.reserve(m2);
  for (int j = 0; j < m2; ++j)
    p.in2_clouds.push_back({b.decode_continuous(L.in2_slot(j, 0), alphas[L.in2_slot(j, 0)]),
                            b.decode_continuous(L.in2_slot(j, 1), alphas[L.in2_slot(j, 1)]),
                            b.decode_continuous(L.in2_slot(j, 2), alphas[L.in2_slot(j, 2)])});
  p.out_singletons.reserve(o);
  for (int h = 0; h < o; ++h)
    p.out_singletons.push_back(b.decode_continuous(L.singleton_slot(h), alphas[L.singleton_slot(h)]));
  if (!b.frozen_rules.empty()) {
    p.rules.entries = b.frozen_rules;
  } else {
    p.rules.entries.reserve(static_cast<std::size_t>(m1) * m2);
    for (int i = 0; i < m1; ++i)
      for (int j = 0; j < m2; ++j) {
        const long r = std::lround(o * alphas[L.rule_slot(i, j)]);
        p.rules.entries.push_back(static_cast<int>(std::clamp(r, 1L, static_cast<long>(o))));
      }
  }
  double ku = b.decode_continuous(SlotLayout::kKu, alphas[SlotLayout::kKu]);
  if (b.integer_ku) ku = std::clamp(static_cast<double>(std::lround(ku)), 0.0, b.pu);
  p.ku = ku;
  return p;
}

// Continuous slots of a given structure in refinement order: input-1 cloud
// fields, input-2 cloud fields, singletons, gain.
inline std::vector<int> continuous_slots(const SlotLayout& L, const ControllerStructure& s) {
  std::vector<int> slots;
  slots.reserve(3 * s.m1 + 3 * s.m2 + s.o + 1);
  for (int i = 0; i < s.m1; ++i)
    for (int f = 0; f < 3; ++f) slots.push_back(L.in1_slot(i, f));
  for (int j = 0; j < s.m2; ++j)
    for (int f = 0; f < 3; ++f) slots.push_back(L.in2_slot(j, f));
  for (int h = 0; h < s.o; ++h) slots.push_back(L.singleton_slot(h));
  slots.push_back(SlotLayout::kKu);
  return slots;
}

inline double continuous_value(const ParameterVector& p, const SlotLayout& L, int slot) {
  if (slot == SlotLayout::kKu) return p.ku;
  if (slot >= L.singleton_slot(0) && slot < L.rules_begin())
    return p.out_singletons[slot - L.singleton_slot(0)];
  if (slot >= L.in2_slot(0, 0)) {
    const int off = slot - L.in2_slot(0, 0);
    const CloudDescriptor& c = p.in2_clouds[off / 3];
    const int f = off % 3;
    return f == 0 ? c.ex : (f == 1 ? c.en : c.he);
  }
  const int off = slot - 4;
  const CloudDescriptor& c = p.in1_clouds[off / 3];
  const int f = off % 3;
  return f == 0 ? c.ex : (f == 1 ? c.en : c.he);
}

inline void set_continuous_value(ParameterVector& p, const SlotLayout& L, int slot, double v) {
  if (slot == SlotLayout::kKu) {
    p.ku = v;
    return;
  }
  if (slot >= L.singleton_slot(0) && slot < L.rules_begin()) {
    p.out_singletons[slot - L.singleton_slot(0)] = v;
    return;
  }
  CloudDescriptor* c;
  int f;
  if (slot >= L.in2_slot(0, 0)) {
    const int off = slot - L.in2_slot(0, 0);
    c = &p.in2_clouds[off / 3];
    f = off % 3;
  } else {
    const int off = slot - 4;
    c = &p.in1_clouds[off / 3];
    f = off % 3;
  }
  (f == 0 ? c->ex : (f == 1 ? c->en : c->he)) = v;
}

// One contraction event: freeze the structural integers at the incumbent
// (first time only; their values set the search dimension, so they cannot
// move once windows start shrinking), recenter the incumbent's active
// continuous slots, and shrink every window radius by the contraction
// factor. Rule slots stay on their chaotic trajectories: rule values do not
// affect the dimension, and the rule table keeps exploring while the
// continuous windows zoom.
inline void contract(SearchBounds& b, const ParameterVector& incumbent, double lambda) {
  if (!b.structure_frozen) {
    b.structure_frozen = true;
    b.frozen_m1 = incumbent.structure.m1;
    b.frozen_m2 = incumbent.structure.m2;
    b.frozen_o = incumbent.structure.o;
  }
  for (int s = 0; s < b.layout.total_slots(); ++s) {
    if (!b.is_continuous(s)) continue;
    SearchBounds::Window w = b.window(s);
    w.radius *= lambda;
    b.set_window(s, w);
  }
  for (int s : continuous_slots(b.layout, incumbent.structure)) {
    const auto [lo, hi] = b.slot_range(s);
    SearchBounds::Window w = b.window(s);
    w.center = std::clamp(continuous_value(incumbent, b.layout, s), lo, hi);
    b.set_window(s, w);
  }
}

// Logistic map step; the chaos carrier.
inline double logistic_next(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("logistic_next: alpha must lie in (0, 1)");
  return 4.0 * alpha * (1.0 - alpha);
}

// One logistic trajectory per slot. Seeds avoid the degenerate orbit set
// {0, 0.25, 0.5, 0.75, 1}; an iterate that collapses to an endpoint in
// floating point is re-seeded and counted.
struct TrajectoryPool {
  std::vector<double> alphas;
  long guard_reseeds = 0;

  static double draw_alpha(Rng& rng, const std::vector<double>* taken) {
    static constexpr double degenerate[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (;;) {
      const double a = rng.uniform();
      if (!(a > 0.0 && a < 1.0)) continue;
      bool bad = false;
      for (double d : degenerate)
        if (std::abs(a - d) < 1e-9) {
          bad = true;
          break;
        }
      if (!bad && taken)
        for (double t : *taken)
          if (t == a) {
            bad = true;
            break;
          }
      if (!bad) return a;
    }
  }

  static TrajectoryPool seed(const SlotLayout& layout, Rng& rng) {
    TrajectoryPool pool;
    pool.alphas.reserve(layout.total_slots());
    for (int s = 0; s < layout.total_slots(); ++s)
      pool.alphas.push_back(draw_alpha(rng, &pool.alphas));
    return pool;
  }

  void advance(Rng& rng) {
    for (double& a : alphas) {
      a = logistic_next(a);
      if (!(a > 0.0 && a < 1.0)) {
        a = draw_alpha(rng, nullptr);
        ++guard_reseeds;
      }
    }
  }
};

struct ChaosConfig {
  long max_iterations = 50000;  // evaluation budget
  std::uint64_t seed = 1;
  long stage0_iterations = 500;   // evaluations before the first contraction
  long stagnation_window = 100;   // stagnant evaluations per later contraction
  double contraction_lambda = 0.5;
  double min_radius = 1e-3;       // stop once every window is this narrow
  double j_stop = 1e-3;
  bool variable_scaling = true;   // false: fixed global windows, no freezing
};

struct ChaosResult {
  ParameterVector best;
  OptimizerReport report;
};

// Chaos search: seed the pool, then iterate advance -> decode -> evaluate,
// contracting the carrier windows per the scaling schedule. Stops on the cost
// threshold, the evaluation budget, or the radius floor.
template <class Objective>
ChaosResult chaos_search(Objective&& objective, SearchBounds bounds, const ChaosConfig& cfg) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("chaos_search: budget must be >= 1");
  if (!(cfg.contraction_lambda > 0.0 && cfg.contraction_lambda < 1.0))
    throw std::invalid_argument("chaos_search: contraction factor must lie in (0, 1)");
  Rng rng(cfg.seed);
  TrajectoryPool pool = TrajectoryPool::seed(bounds.layout, rng);

  OptimizerReport report;
  report.method = cfg.variable_scaling ? "chaos" : "single-chaos";
  report.seed = cfg.seed;
  report.budget = cfg.max_iterations;

  ParameterVector best;
  double best_cost = std::numeric_limits<double>::infinity();
  long since_event = 0;
  bool contracted = false;

  for (long eval = 1; eval <= cfg.max_iterations; ++eval) {
    pool.advance(rng);
    ParameterVector candidate = decode(pool.alphas, bounds);
    const double cost = objective(candidate);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
      report.history.push_back({eval, cost});
      since_event = 0;
      if (!report.evals_to_threshold && cost <= cfg.j_stop) report.evals_to_threshold = eval;
    } else {
      ++since_event;
    }
    if (best_cost <= cfg.j_stop) break;
    if (cfg.variable_scaling) {
      const bool trigger = contracted ? since_event >= cfg.stagnation_window
                                      : eval >= cfg.stage0_iterations;
      if (trigger) {
        contract(bounds, best, cfg.contraction_lambda);
        contracted = true;
        since_event = 0;
        report.contraction_events.push_back(eval);
        if (bounds.max_radius() < cfg.min_radius) break;
      }
    }
  }
  report.best_cost = best_cost;
  report.best_params = best;
  return {std::move(best), std::move(report)};
}

}  // namespace cloudopt
