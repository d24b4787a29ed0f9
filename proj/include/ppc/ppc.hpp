#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ppc/fpca.hpp"
#include "ppc/sample.hpp"

namespace ppc {

struct PpcResult {
  Eigen::MatrixXd u_hat;         // M x M, rows u_j'
  Eigen::MatrixXd v_hat;         // P x P, rows v_j'
  Eigen::MatrixXd ppcs;          // M x K coefficient rows (xi_j)
  Eigen::MatrixXd benchmarks;    // P x K coefficient rows (theta_j)
  Eigen::VectorXd correlations;  // rho_j, j <= min(M, P), descending
  int n_pairs = 0;

  int n_rotated() const { return static_cast<int>(ppcs.rows()); }
};

// SVD rotation of orthonormal frames gamma (M x K rows) toward f (P x K rows),
// both expressed in a common orthonormal coordinate system.
PpcResult ppc_rotation(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& f);

PpcResult ppc_rotation(const FpcaResult& truncated, const PeriodicSubBasis& sub);

// General (non-orthonormal frame) route: whitens by sigma_gg and sigma_ff
// before the SVD.  Throws singular_system_error when either gram matrix has
// reciprocal condition number below 1e-10.
PpcResult ppc_rotation_general(const Eigen::MatrixXd& gamma,
                               const Eigen::MatrixXd& f,
                               const Eigen::MatrixXd& sigma_gg,
                               const Eigen::MatrixXd& sigma_ff);

// Projection scores of every curve on a component set sharing the basis.
Eigen::MatrixXd score_matrix(const FunctionalSample& sample,
                             const FourierBasis& component_basis,
                             const Eigen::MatrixXd& components);

// Scores plus 1/(N-1) score variances; needs N >= 2.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> scores(
    const FunctionalSample& sample, const FourierBasis& component_basis,
    const Eigen::MatrixXd& components);

struct VarianceDecomposition {
  Eigen::VectorXd lambda_gamma;  // M
  Eigen::VectorXd lambda_xi;     // M
  Eigen::VectorXd lambda_theta;  // n_pairs
  Eigen::VectorXd lambda_nu;     // empty unless a VARIMAX result is supplied
  Eigen::VectorXd cum_gamma, cum_xi, cum_theta, cum_nu;
};

VarianceDecomposition variance_decomposition(const FunctionalSample& sample,
                                             const FpcaResult& truncated,
                                             const PpcResult& rotation,
                                             const VarimaxResult* vm = nullptr);

struct AiDiagnostic {
  std::vector<double> ai;  // AI_j; NaN where the denominator vanishes
  int suggested_j = 0;     // advisory elbow, 1-based
};

AiDiagnostic annual_information(const VarianceDecomposition& decomp);

struct Decomposition {
  Eigen::MatrixXd nearly_periodic;  // N x K coefficient rows
  Eigen::MatrixXd aperiodic;
  Eigen::MatrixXd remainder;
  Eigen::VectorXd mean;
};

// Split each curve into mean + nearly-periodic (first j_cut PPCs) +
// aperiodic (remaining rotated PPCs) + small-eigenvalue remainder.
Decomposition decompose(const FunctionalSample& sample,
                        const PpcResult& rotation, const FpcaResult& full,
                        int j_cut);

struct StabilityTrace {
  std::vector<int> m_upper;  // upper M of each consecutive pair
  std::vector<double> ppc_trace;
  std::vector<double> varimax_max_variance;
  std::vector<double> varimax_closest_previous;
  std::vector<double> varimax_closest_first_fpc;
};

// L2 differences of the leading rotated component across consecutive M,
// for the PPC rotation and three first-VARIMAX-component definitions.
StabilityTrace stability_trace(const FpcaResult& full,
                               const PeriodicSubBasis& sub,
                               const std::vector<int>& m_list,
                               const Eigen::VectorXd& eval_grid);

}  // namespace ppc
