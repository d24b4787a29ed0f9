#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ppc/fpca.hpp"
#include "ppc/ppc.hpp"
#include "ppc/sample.hpp"
#include "ppc/smoothing.hpp"

namespace ppc {

// Demean (when the basis has a constant), center, fPCA, truncate, rotate.
struct CoeffAnalysis {
  FunctionalSample centered;
  FpcaResult full;
  FpcaResult truncated;
  PpcResult rotation;
};

CoeffAnalysis analyze_coefficients(const FunctionalSample& sample,
                                   const TruncationRule& rule,
                                   const PeriodicSubBasis& sub);

struct NullConstruction {
  enum class Kind { Replacement, Inflation };
  Kind kind = Kind::Replacement;
  FunctionalSample curves;     // hypothesized curves (centered level)
  Eigen::VectorXd tau;         // empty for replacement
  double achieved_rho1 = 0.0;  // rho_1 of the constructed curves
  double kl = 0.0;             // KL(Omega_0, Omega), inflation only
  bool converged = true;
};

// (1/2) sum(tau^2 - 1 - log tau^2); zero exactly at tau = 1.
double kl_divergence(const Eigen::VectorXd& tau);

// Replace the first PPC by its benchmark in every curve's expansion.
NullConstruction replacement_null(const FunctionalSample& centered,
                                  const FpcaResult& full,
                                  const PpcResult& rotation,
                                  const TruncationRule& rule,
                                  const PeriodicSubBasis& sub);

// Rescale component scores by tau minimizing KL - lambda_penalty * log rho_1.
NullConstruction inflation_null(const FunctionalSample& centered,
                                const FpcaResult& full,
                                const PpcResult& rotation,
                                const TruncationRule& rule,
                                const PeriodicSubBasis& sub,
                                double lambda_penalty);

struct TestConfig {
  double time_span = 0.0;  // 0: inferred as t_max + first grid spacing
  int n_basis = 0;         // 0: saturated (n - 1 non-constant functions)
  std::vector<double> lambda_grid = default_lambda_grid();
  TruncationRule rule = TruncationRule::by_fraction(0.8);
  int years = 1;
  int p = 2;
  int b = 500;
  std::uint64_t seed = 0;
  NullConstruction::Kind null_kind = NullConstruction::Kind::Replacement;
  double lambda_penalty = 1e4;
  bool reselect_lambda = false;
};

struct PeriodicityTestResult {
  double observed_rho1 = 0.0;
  std::vector<double> bootstrap_rho1;
  double p_value = 1.0;
  int b = 0;
  std::uint64_t seed = 0;
  TruncationRule rule;
  double null_achieved_rho1 = 0.0;
};

// Bootstrap test of H0: rho_1 = 1 against rho_1 < 1.
PeriodicityTestResult bootstrap_test(const RawCurveSet& raw,
                                     const TestConfig& config);

}  // namespace ppc
