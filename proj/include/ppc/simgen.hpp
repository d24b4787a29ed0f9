#pragma once

#include <cstdint>
#include <vector>

#include "ppc/sample.hpp"

namespace ppc {

// Configuration for the two synthetic curve generators: scheme 1 varies the
// amount of annual variation, scheme 2 adds a high-frequency disturbance on
// top of a fixed annual signal.
struct SchemeConfig {
  int scheme = 1;
  int n_curves = 200;
  double time_span = 100.0;
  int years = 4;
  double level = 1.0;     // L
  int hfd_freq = 19;      // scheme 2 only; must not be a multiple of years
  int n_grid = 201;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratedSet {
  RawCurveSet raw;
  FunctionalSample truth;  // exact generating coefficients (orthonormal units)
};

GeneratedSet generate(const SchemeConfig& config);

// Canonical L levels: scheme 1 -> 6 values, scheme 2 -> 4 values.
std::vector<double> level_grid(int scheme);

}  // namespace ppc
