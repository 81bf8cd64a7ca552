// Finite-difference validation suite: five smooth functions with analytic
// gradients, compared against fd_gradient at a configurable step.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cloudopt/cg.hpp"

namespace cloudopt {

struct GradCheckCase {
  std::string name;
  std::function<double(const std::vector<double>&)> f;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
  std::vector<double> point;
};

inline std::vector<GradCheckCase> gradcheck_suite() {
  std::vector<GradCheckCase> cases;
  cases.push_back(
      {"half-sum-of-squares",
       [](const std::vector<double>& p) {
         double s = 0.0;
         for (double x : p) s += 0.5 * x * x;
         return s;
       },
       [](const std::vector<double>& p) { return p; },
       {1.0, 2.0, 3.0}});
  cases.push_back(
      {"sum-of-sines",
       [](const std::vector<double>& p) {
         double s = 0.0;
         for (double x : p) s += std::sin(x);
         return s;
       },
       [](const std::vector<double>& p) {
         std::vector<double> g;
         for (double x : p) g.push_back(std::cos(x));
         return g;
       },
       {0.0, 1.5707963267948966, 1.0471975511965976}});
  cases.push_back(
      {"rosenbrock",
       [](const std::vector<double>& p) {
         const double x = p[0], y = p[1];
         return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x);
       },
       [](const std::vector<double>& p) {
         const double x = p[0], y = p[1];
         return std::vector<double>{-400.0 * x * (y - x * x) - 2.0 * (1.0 - x),
                                    200.0 * (y - x * x)};
       },
       {-1.2, 1.0}});
  cases.push_back(
      {"sum-of-exponentials",
       [](const std::vector<double>& p) {
         double s = 0.0;
         for (double x : p) s += std::exp(0.3 * x);
         return s;
       },
       [](const std::vector<double>& p) {
         std::vector<double> g;
         for (double x : p) g.push_back(0.3 * std::exp(0.3 * x));
         return g;
       },
       {0.5, -0.7, 1.1}});
  cases.push_back(
      {"log-cosh",
       [](const std::vector<double>& p) {
         double s = 0.0;
         for (double x : p) s += std::log(std::cosh(x));
         return s;
       },
       [](const std::vector<double>& p) {
         std::vector<double> g;
         for (double x : p) g.push_back(std::tanh(x));
         return g;
       },
       {0.8, -0.3, 1.9}});
  return cases;
}

struct GradCheckResult {
  std::string name;
  double max_rel_error;
};

// Max component error relative to the analytic gradient's sup-norm (floored
// at 1 so near-zero gradients do not blow up the ratio).
inline GradCheckResult run_gradcheck_case(const GradCheckCase& c, double h,
                                          bool inject_sign_flip = false) {
  std::vector<double> fd = fd_gradient(c.f, c.point, h);
  if (inject_sign_flip && !fd.empty()) fd[0] = -fd[0];
  const std::vector<double> an = c.grad(c.point);
  double scale = 1.0;
  for (double g : an) scale = std::max(scale, std::abs(g));
  double err = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i) err = std::max(err, std::abs(fd[i] - an[i]));
  return {c.name, err / scale};
}

}  // namespace cloudopt
