#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ppc/fourier_basis.hpp"

namespace ppc {

// Discrete observations Y_ij on a shared, strictly increasing time grid.
struct RawCurveSet {
  Eigen::VectorXd times;       // n
  Eigen::MatrixXd values;      // N x n
  std::vector<std::string> ids;

  int n_curves() const { return static_cast<int>(values.rows()); }
  int n_points() const { return static_cast<int>(values.cols()); }
  void validate() const;
};

// N curves as coefficient rows in a shared basis.
struct FunctionalSample {
  FourierBasis basis{1.0, 1, true};
  Eigen::MatrixXd coefficients;  // N x basis.size()
  bool demeaned = false;
  bool centered = false;
  Eigen::VectorXd mean;          // cross-section mean coefficients, set on centering

  int n_curves() const { return static_cast<int>(coefficients.rows()); }
};

}  // namespace ppc
