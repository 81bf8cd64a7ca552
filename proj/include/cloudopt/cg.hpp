// Conjugate-gradient refinement of a continuous parameter vector with
// central-difference gradients, a doubling-bracket + golden-section line
// search, and the Polak-Ribiere direction update.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cloudopt/report.hpp"

namespace cloudopt {

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

}  // namespace detail

struct CGConfig {
  int max_iterations = 100;
  double fd_step = 1e-5;
  double grad_tolerance = 1e-6;
  double line_search_tolerance = 1e-6;
  int restart_period = 0;             // 0: restart every dim steps
  long max_evaluations = 0;           // 0: no cap on objective calls
  std::vector<double> lower, upper;   // optional per-component clipping
  std::function<bool()> should_stop;  // optional external stop, checked per iteration
};

struct CGState {
  std::vector<double> p_current;
  std::vector<double> gradient;
  std::vector<double> direction;
  double delta = 0.0;
  int iteration = 0;
};

// Central differences of a pure objective. Probes run in fixed index order so
// the result is deterministic under common random numbers.
template <class Objective>
std::vector<double> fd_gradient(Objective&& f, const std::vector<double>& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  std::vector<double> g(p.size());
  std::vector<double> q = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = p[i] + h;
    const double fp = f(q);
    q[i] = p[i] - h;
    const double fm = f(q);
    q[i] = p[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw evaluation_failure("fd_gradient: objective returned a non-finite value");
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Approximate minimizer of phi(t) = f(p + t*w) over t >= 0. Brackets by
// doubling from 1e-4 (shrinking first if that probe does not improve), then
// golden-sections to the relative tolerance. One extra probe at the parabola
// vertex of the wide bracket sharpens the result past the cancellation noise
// floor near flat minima; it is exact for quadratic rays. Returns the best t
// actually evaluated, so phi(t) <= phi(0) always holds; 0 when nothing
// improved.
template <class Objective>
double line_search(Objective&& f, const std::vector<double>& p, const std::vector<double>& w,
                   double rel_tol = 1e-6) {
  bool all_zero = true;
  for (double wi : w)
    if (wi != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) throw std::invalid_argument("line_search: direction is zero");

  std::vector<double> q(p.size());
  auto phi = [&](double t) {
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] + t * w[i];
    return f(q);
  };

  const double phi0 = phi(0.0);
  double best_t = 0.0;
  double best_f = phi0;
  auto probe = [&](double t) {
    const double v = phi(t);
    if (v < best_f) {
      best_f = v;
      best_t = t;
    }
    return v;
  };

  double t = 1e-4;
  double ft = probe(t);
  if (ft >= phi0) {
    bool improved = false;
    for (int i = 0; i < 8 && !improved; ++i) {
      t *= 0.1;
      ft = probe(t);
      improved = ft < phi0;
    }
    if (!improved) return 0.0;
  }

  double lo = 0.0, flo = phi0;
  double mid = t, fmid = ft;
  double hi = 0.0, fhi = 0.0;
  for (;;) {
    const double t2 = 2.0 * mid;
    const double f2 = probe(t2);
    if (f2 >= fmid) {
      hi = t2;
      fhi = f2;
      break;
    }
    lo = mid;
    flo = fmid;
    mid = t2;
    fmid = f2;
    if (t2 > 1e15) return best_t;  // descent did not level off; take the best probe
  }

  // Vertex of the parabola through the bracket triple; the wide spacing keeps
  // the fit well above evaluation noise.
  {
    const double num = (mid - lo) * (mid - lo) * (fmid - fhi) -
                       (mid - hi) * (mid - hi) * (fmid - flo);
    const double den = (mid - lo) * (fmid - fhi) - (mid - hi) * (fmid - flo);
    if (den != 0.0) {
      const double v = mid - 0.5 * num / den;
      if (std::isfinite(v) && v > lo && v < hi) probe(v);
    }
  }

  constexpr double gr = 0.61803398874989485;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = probe(c);
  double fd = probe(d);
  while ((b - a) > rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = probe(d);
    }
  }
  return best_t;
}

// Polak-Ribiere conjugation coefficient; 0 (restart) when the previous
// gradient is degenerate.
inline double pr_coefficient(const std::vector<double>& g, const std::vector<double>& g_prev) {
  const double denom = detail::dot(g_prev, g_prev);
  if (denom == 0.0) return 0.0;
  return (detail::dot(g, g) - detail::dot(g, g_prev)) / denom;
}

struct CGResult {
  std::vector<double> best;
  OptimizerReport report;
};

// CG loop: gradient, direction update, line search, clipped step. Restarts to
// steepest descent when the coefficient turns negative or every restart
// period. Stops on the gradient tolerance, the iteration cap, the evaluation
// cap, or the external stop callback.
template <class Objective>
CGResult cg_refine(Objective&& objective, std::vector<double> p0, const CGConfig& cfg) {
  const std::size_t dim = p0.size();
  if (dim == 0) throw std::invalid_argument("cg_refine: empty start vector");
  const bool has_lower = !cfg.lower.empty();
  const bool has_upper = !cfg.upper.empty();
  if ((has_lower && cfg.lower.size() != dim) || (has_upper && cfg.upper.size() != dim))
    throw std::invalid_argument("cg_refine: bound size mismatch");

  OptimizerReport report;
  report.method = "cg";
  report.budget = cfg.max_evaluations;
  long evals = 0;
  double best_seen = std::numeric_limits<double>::infinity();

  auto f = [&](const std::vector<double>& q) {
    const double v = objective(q);
    ++evals;
    if (!std::isfinite(v)) throw evaluation_failure("cg_refine: objective returned a non-finite value");
    if (v < best_seen) {
      best_seen = v;
      report.history.push_back({evals, v});
    }
    return v;
  };
  auto clip = [&](std::vector<double>& q) {
    bool changed = false;
    for (std::size_t i = 0; i < dim; ++i) {
      double v = q[i];
      if (has_lower) v = std::max(v, cfg.lower[i]);
      if (has_upper) v = std::min(v, cfg.upper[i]);
      if (v != q[i]) {
        q[i] = v;
        changed = true;
      }
    }
    return changed;
  };

  CGState st;
  st.p_current = std::move(p0);
  clip(st.p_current);
  // f at the current accepted point, evaluated lazily (only the clipping
  // re-check needs it).
  double f_current = std::numeric_limits<double>::quiet_NaN();

  st.gradient = fd_gradient(f, st.p_current, cfg.fd_step);
  st.direction.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) st.direction[i] = -st.gradient[i];
  const int restart = cfg.restart_period > 0 ? cfg.restart_period : static_cast<int>(dim);
  bool steepest = true;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (detail::norm2(st.gradient) <= cfg.grad_tolerance) break;
    if (cfg.should_stop && cfg.should_stop()) break;
    if (cfg.max_evaluations > 0 && evals >= cfg.max_evaluations) break;

    if (detail::norm2(st.direction) == 0.0)
      for (std::size_t i = 0; i < dim; ++i) st.direction[i] = -st.gradient[i];
    const double eta = line_search(f, st.p_current, st.direction, cfg.line_search_tolerance);
    if (eta == 0.0) {
      // No descent along this ray. Fall back to steepest descent once; a
      // failed steepest line search means we are done at this resolution.
      if (steepest) break;
      for (std::size_t i = 0; i < dim; ++i) st.direction[i] = -st.gradient[i];
      steepest = true;
      continue;
    }
    if (eta > 0.0) {
      std::vector<double> p_new(dim);
      for (std::size_t i = 0; i < dim; ++i) p_new[i] = st.p_current[i] + eta * st.direction[i];
      if (clip(p_new)) {
        // The clipped point is off the searched ray; keep it only if it
        // still descends.
        if (std::isnan(f_current)) f_current = f(st.p_current);
        const double f_new = f(p_new);
        if (f_new <= f_current) {
          st.p_current = std::move(p_new);
          f_current = f_new;
        }
      } else {
        st.p_current = std::move(p_new);
        f_current = std::numeric_limits<double>::quiet_NaN();
      }
    }

    std::vector<double> g_new = fd_gradient(f, st.p_current, cfg.fd_step);
    st.iteration = it;
    double delta = pr_coefficient(g_new, st.gradient);
    if (delta < 0.0 || it % restart == 0) delta = 0.0;
    for (std::size_t i = 0; i < dim; ++i) st.direction[i] = -g_new[i] + delta * st.direction[i];
    st.gradient = std::move(g_new);
    st.delta = delta;
    steepest = delta == 0.0;
  }

  report.best_cost = best_seen;
  return {std::move(st.p_current), std::move(report)};
}

}  // namespace cloudopt
