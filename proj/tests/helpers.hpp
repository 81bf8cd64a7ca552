// Shared test utilities: random valid parameter generation and a tiny
// fixed-seed harness glue.
#pragma once

#include <vector>

#include "cloudopt/baselines.hpp"
#include "cloudopt/cloud.hpp"
#include "cloudopt/rng.hpp"

namespace testutil {

inline cloudopt::ParameterVector random_valid_params(cloudopt::Rng& rng, int cap_m = 4,
                                                     int cap_o = 4, double pu = 5.0) {
  cloudopt::SlotLayout layout;
  layout.cap_m1 = cap_m;
  layout.cap_m2 = cap_m;
  layout.cap_o = cap_o;
  const auto bounds = cloudopt::SearchBounds::full(layout, pu);
  return cloudopt::random_params(rng, bounds);
}

}  // namespace testutil
