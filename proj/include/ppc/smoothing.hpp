#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ppc/fourier_basis.hpp"
#include "ppc/sample.hpp"

namespace ppc {

struct SmoothingFit {
  FunctionalSample sample;                          // fitted curves x_hat
  double lambda = 0.0;                              // selected smoothing parameter
  std::vector<std::pair<double, double>> gcv_trace; // (lambda, summed GCV)
  Eigen::MatrixXd residuals;                        // N x n
  double edf = 0.0;                                 // trace of the hat matrix
};

// 25 log-spaced points spanning 1e-8 .. 1e4.
std::vector<double> default_lambda_grid();

// Penalized least squares fit per curve with one shared lambda chosen to
// minimize the sum of per-curve GCV scores over the grid (with one 10-point
// zoom around the grid minimizer).
SmoothingFit smooth(const RawCurveSet& raw, const FourierBasis& basis,
                    const std::vector<double>& lambda_grid);

// Zero the constant coefficient of every curve (remove the time average).
FunctionalSample demean_timeseries(const FunctionalSample& sample);

// Subtract the cross-section mean; returns the centered sample with the mean
// coefficient vector recorded in `mean`.
FunctionalSample center_crosssection(const FunctionalSample& sample);

}  // namespace ppc
