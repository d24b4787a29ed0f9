#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppc/sample.hpp"

namespace ppc {

struct FpcaResult {
  FourierBasis basis{1.0, 1, true};
  Eigen::MatrixXd components;   // M_total x K coefficient rows (gamma_j)
  Eigen::VectorXd eigenvalues;  // descending, nonnegative
  Eigen::MatrixXd scores;       // N x M_total
  double total_variance = 0.0;

  int n_components() const { return static_cast<int>(components.rows()); }
  // components with eigenvalue > 1e-10 * total_variance
  int n_positive() const;
};

struct TruncationRule {
  enum class Kind { Count, Fraction };
  Kind kind = Kind::Fraction;
  int count = 0;
  double fraction = 0.8;

  static TruncationRule by_count(int m) { return {Kind::Count, m, 0.0}; }
  static TruncationRule by_fraction(double q) { return {Kind::Fraction, 0, q}; }
};

// Eigen-decomposition of the sample covariance of a centered sample.
// Eigenvalues carry the 1/(N-1) score-variance normalization.
FpcaResult fpca(const FunctionalSample& sample);

int select_components(const FpcaResult& result, const TruncationRule& rule);
FpcaResult truncate(const FpcaResult& result, const TruncationRule& rule);

struct VarimaxResult {
  Eigen::MatrixXd rotation;            // M x M orthonormal T
  Eigen::MatrixXd rotated_components;  // M x K coefficient rows (nu_j)
  std::vector<double> criterion_trace; // objective per sweep
  Eigen::VectorXd explained_variance;  // lambda^nu_j
  bool converged = true;
};

// Classic VARIMAX on the M x n evaluation matrix of the leading components.
// Kaiser row normalization is off by default.
VarimaxResult varimax(const FpcaResult& result, int m,
                      const Eigen::VectorXd& eval_grid, bool kaiser = false);

}  // namespace ppc
