// Run reports and the shared evaluation-counting wrapper. Every optimizer
// consumes its objective through an EvalCounter, so evaluations-to-threshold
// is comparable across methods by construction.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudopt/cloud.hpp"

namespace cloudopt {

// Raised when an objective produces a non-finite value.
struct evaluation_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalRecord {
  long index;        // 1-based evaluation count at which the best improved
  double best;
};

struct OptimizerReport {
  std::string method;
  std::uint64_t seed = 0;
  std::optional<long> evals_to_threshold;  // empty = budget-exhausted
  long budget = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<EvalRecord> history;         // best-so-far, non-increasing
  ParameterVector best_params;
  long chaos_evals = 0;
  long cg_evals = 0;
  std::vector<long> contraction_events;    // evaluation indices (chaos phase)
};

class EvalCounter {
 public:
  EvalCounter(double threshold, long budget) : threshold_(threshold), budget_(budget) {}

  // Returns true when this evaluation improved the best.
  bool record(double cost) {
    ++count_;
    bool improved = false;
    if (cost < best_) {
      best_ = cost;
      history_.push_back({count_, cost});
      improved = true;
    }
    if (!first_crossing_ && best_ <= threshold_ && count_ <= budget_) first_crossing_ = count_;
    return improved;
  }

  long count() const { return count_; }
  double best() const { return best_; }
  bool exhausted() const { return count_ >= budget_; }
  bool crossed() const { return first_crossing_.has_value(); }
  std::optional<long> first_crossing() const { return first_crossing_; }
  const std::vector<EvalRecord>& history() const { return history_; }
  long budget() const { return budget_; }
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  long budget_;
  long count_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::optional<long> first_crossing_;
  std::vector<EvalRecord> history_;
};

struct MethodSummary {
  std::string method;
  std::optional<long> median_evals;  // empty = median run exhausted its budget
  double success_rate = 0.0;
};

// Lower median of evaluations-to-threshold with exhausted runs ranked after
// every finite count. Never feeds the exhausted marker into arithmetic.
inline MethodSummary summarize(const std::string& method,
                               const std::vector<OptimizerReport>& runs) {
  MethodSummary s;
  s.method = method;
  if (runs.empty()) return s;
  std::vector<long> finite;
  long successes = 0;
  for (const OptimizerReport& r : runs) {
    if (r.evals_to_threshold) {
      finite.push_back(*r.evals_to_threshold);
      ++successes;
    }
  }
  std::sort(finite.begin(), finite.end());
  const std::size_t mid = (runs.size() - 1) / 2;
  if (mid < finite.size()) s.median_evals = finite[mid];
  s.success_rate = static_cast<double>(successes) / static_cast<double>(runs.size());
  return s;
}

}  // namespace cloudopt
