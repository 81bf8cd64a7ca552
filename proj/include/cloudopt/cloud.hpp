// Triangle membership clouds and the 2-input/1-output cloud controller.
//
// A cloud is (Ex, En, He): expected value, entropy and hyper-entropy on a
// normalized universe. Each membership evaluation first draws an effective
// entropy En' = |N(En, He^2)| and grades the input against a triangle of
// half-width 3*En' centered at Ex. Output clouds are singletons, so the
// defuzzified control is a firing-weighted average scaled by the gain Ku.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloudopt/rng.hpp"

namespace cloudopt {

constexpr int kMaxClouds = 20;
constexpr double kEntropyFloor = 1e-6;

struct CloudDescriptor {
  double ex = 0.0;  // expected value, in [-1, 1]
  double en = 0.0;  // entropy, in [0, 1]
  double he = 0.0;  // hyper-entropy, in [0, 1]
};

struct ControllerStructure {
  int m1 = 1;       // clouds on input 1
  int m2 = 1;       // clouds on input 2
  int o = 1;        // output singletons
  double pu = 1.0;  // gain ceiling; ku lives in [0, pu]
};

// Maps the antecedent pair (i, j) to a 1-based output singleton index.
struct RuleTable {
  std::vector<int> entries;  // length m1*m2, row-major over (i, j)

  int at(int i, int j, int m2) const {
    return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(m2) +
                   static_cast<std::size_t>(j)];
  }
};

struct ParameterVector {
  ControllerStructure structure;
  std::vector<CloudDescriptor> in1_clouds;  // length m1
  std::vector<CloudDescriptor> in2_clouds;  // length m2
  std::vector<double> out_singletons;       // length o, values in [-1, 1]
  RuleTable rules;
  double ku = 0.0;  // output gain, in [0, pu]
};

inline void validate(const ParameterVector& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("ParameterVector: " + what);
  };
  const ControllerStructure& s = p.structure;
  if (s.m1 < 1 || s.m1 > kMaxClouds) fail("m1 out of [1, 20]");
  if (s.m2 < 1 || s.m2 > kMaxClouds) fail("m2 out of [1, 20]");
  if (s.o < 1 || s.o > kMaxClouds) fail("o out of [1, 20]");
  if (!(s.pu > 0.0)) fail("pu must be positive");
  if (p.in1_clouds.size() != static_cast<std::size_t>(s.m1)) fail("in1_clouds length != m1");
  if (p.in2_clouds.size() != static_cast<std::size_t>(s.m2)) fail("in2_clouds length != m2");
  if (p.out_singletons.size() != static_cast<std::size_t>(s.o)) fail("out_singletons length != o");
  if (p.rules.entries.size() != static_cast<std::size_t>(s.m1) * static_cast<std::size_t>(s.m2))
    fail("rule table length != m1*m2");
  auto check_cloud = [&](const CloudDescriptor& c) {
    if (c.ex < -1.0 || c.ex > 1.0) fail("cloud ex out of [-1, 1]");
    if (c.en < 0.0 || c.en > 1.0) fail("cloud en out of [0, 1]");
    if (c.he < 0.0 || c.he > 1.0) fail("cloud he out of [0, 1]");
  };
  for (const CloudDescriptor& c : p.in1_clouds) check_cloud(c);
  for (const CloudDescriptor& c : p.in2_clouds) check_cloud(c);
  for (double v : p.out_singletons)
    if (v < -1.0 || v > 1.0) fail("singleton out of [-1, 1]");
  for (int r : p.rules.entries)
    if (r < 1 || r > s.o) fail("rule entry out of [1, o]");
  if (p.ku < 0.0 || p.ku > s.pu) fail("ku out of [0, pu]");
}

inline bool is_valid(const ParameterVector& p) {
  try {
    validate(p);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// Effective entropy for one membership evaluation: |N(en, he^2)| floored at
// kEntropyFloor. he = 0 short-circuits without touching the stream, so
// hyper-entropy-free controllers are reproducible across droplet seeds.
inline double sample_entropy(const CloudDescriptor& cloud, Rng& droplets) {
  if (cloud.he == 0.0) return std::max(kEntropyFloor, cloud.en);
  return std::max(kEntropyFloor, std::abs(droplets.gaussian(cloud.en, cloud.he)));
}

// Triangle grade: 1 at Ex, linear to 0 at |x - Ex| = 3*En'.
inline double membership(double x, const CloudDescriptor& cloud, double en_prime) {
  if (!(en_prime > 0.0)) throw std::invalid_argument("membership: en_prime must be positive");
  return std::max(0.0, 1.0 - std::abs(x - cloud.ex) / (3.0 * en_prime));
}

// Controller inference. Inputs are clamped to the normalized universe; every
// rule resamples the entropy of both antecedent clouds; zero total firing
// yields the neutral action u = 0.
inline double infer(const ParameterVector& p, double e, double de, Rng& droplets) {
  e = std::clamp(e, -1.0, 1.0);
  de = std::clamp(de, -1.0, 1.0);
  const int m1 = p.structure.m1;
  const int m2 = p.structure.m2;
  double weighted = 0.0;
  double total = 0.0;
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      const CloudDescriptor& c1 = p.in1_clouds[i];
      const CloudDescriptor& c2 = p.in2_clouds[j];
      const double mu1 = membership(e, c1, sample_entropy(c1, droplets));
      const double mu2 = membership(de, c2, sample_entropy(c2, droplets));
      const double w = mu1 * mu2;
      weighted += w * p.out_singletons[p.rules.at(i, j, m2) - 1];
      total += w;
    }
  }
  const double u_norm = total == 0.0 ? 0.0 : weighted / total;
  return p.ku * u_norm;
}

}  // namespace cloudopt
