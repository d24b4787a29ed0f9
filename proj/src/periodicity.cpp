#include "ppc/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ppc/errors.hpp"
#include "ppc/rng.hpp"

namespace ppc {

CoeffAnalysis analyze_coefficients(const FunctionalSample& sample,
                                   const TruncationRule& rule,
                                   const PeriodicSubBasis& sub) {
  CoeffAnalysis out;
  FunctionalSample work = sample;
  if (work.basis.has_constant()) work = demean_timeseries(work);
  out.centered = center_crosssection(work);
  out.full = fpca(out.centered);
  out.truncated = truncate(out.full, rule);
  out.rotation = ppc_rotation(out.truncated, sub);
  return out;
}

double kl_divergence(const Eigen::VectorXd& tau) {
  double kl = 0.0;
  for (Eigen::Index j = 0; j < tau.size(); ++j) {
    if (!(tau[j] > 0.0))
      throw std::invalid_argument("rescaling factors must be strictly positive");
    const double t2 = tau[j] * tau[j];
    kl += t2 - 1.0 - std::log(t2);
  }
  return 0.5 * kl;
}

namespace {

// Shared machinery: fixed orthonormal components {theta_1, xi_2..xi_M,
// gamma_{M+1}..gamma_K} with the original scores.
struct NullFrame {
  Eigen::MatrixXd psi;     // K x width coefficient rows
  Eigen::MatrixXd scores;  // N x K
  Eigen::VectorXd lambda;  // base score variances
  int m = 0;
};

NullFrame make_null_frame(const FunctionalSample& centered,
                          const FpcaResult& full, const PpcResult& rotation) {
  const int m = rotation.n_rotated();
  const int k = full.n_positive();
  if (m > k)
    throw std::invalid_argument("rotated components exceed positive fPCs");
  const Eigen::MatrixXd& z = centered.coefficients;

  NullFrame frame;
  frame.m = m;
  frame.psi.resize(k, z.cols());
  frame.psi.row(0) = rotation.benchmarks.row(0);
  if (m > 1) frame.psi.middleRows(1, m - 1) = rotation.ppcs.bottomRows(m - 1);
  if (k > m) frame.psi.bottomRows(k - m) = full.components.middleRows(m, k - m);

  frame.scores.resize(z.rows(), k);
  frame.scores.col(0) = z * rotation.ppcs.row(0).transpose();  // s^xi_1
  if (m > 1)
    frame.scores.middleCols(1, m - 1) =
        z * rotation.ppcs.bottomRows(m - 1).transpose();
  if (k > m)
    frame.scores.rightCols(k - m) =
        z * full.components.middleRows(m, k - m).transpose();
  frame.lambda = frame.scores.colwise().squaredNorm().transpose() /
                 static_cast<double>(z.rows() - 1);
  return frame;
}

// rho_1 of the analytic covariance with variances scaled by tau^2 on the
// first M components: re-sort, re-truncate, top singular value of the
// cross-gram with the periodic sub-basis.
double analytic_rho1(const NullFrame& frame, const Eigen::MatrixXd& cross_all,
                     const Eigen::VectorXd& tau, const TruncationRule& rule) {
  const int k = static_cast<int>(frame.lambda.size());
  Eigen::VectorXd v = frame.lambda;
  for (int j = 0; j < frame.m; ++j) v[j] *= tau[j] * tau[j];

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return v[a] > v[b]; });

  int keep;
  if (rule.kind == TruncationRule::Kind::Count) {
    keep = std::min(rule.count, k);
  } else {
    const double total = v.sum();
    double cum = 0.0;
    keep = k;
    for (int i = 0; i < k; ++i) {
      cum += v[order[i]];
      if (cum / total >= rule.fraction - 1e-12) {
        keep = i + 1;
        break;
      }
    }
  }

  Eigen::MatrixXd g(keep, cross_all.cols());
  for (int i = 0; i < keep; ++i) g.row(i) = cross_all.row(order[i]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  return std::min(svd.singularValues()(0), 1.0);
}

}  // namespace

NullConstruction replacement_null(const FunctionalSample& centered,
                                  const FpcaResult& full,
                                  const PpcResult& rotation,
                                  const TruncationRule& rule,
                                  const PeriodicSubBasis& sub) {
  const NullFrame frame = make_null_frame(centered, full, rotation);
  NullConstruction out;
  out.kind = NullConstruction::Kind::Replacement;
  out.curves.basis = centered.basis;
  out.curves.coefficients = frame.scores * frame.psi;
  out.achieved_rho1 =
      analyze_coefficients(out.curves, rule, sub).rotation.correlations[0];
  return out;
}

NullConstruction inflation_null(const FunctionalSample& centered,
                                const FpcaResult& full,
                                const PpcResult& rotation,
                                const TruncationRule& rule,
                                const PeriodicSubBasis& sub,
                                double lambda_penalty) {
  if (!(lambda_penalty > 0.0))
    throw std::invalid_argument("penalty weight must be positive");
  const NullFrame frame = make_null_frame(centered, full, rotation);
  const Eigen::MatrixXd cross_all = frame.psi * sub.coefficient_rows().transpose();
  const int m = frame.m;

  auto objective = [&](const Eigen::VectorXd& eta) {
    const Eigen::VectorXd tau = eta.array().exp();
    const double rho = analytic_rho1(frame, cross_all, tau, rule);
    return kl_divergence(tau) - lambda_penalty * std::log(std::max(rho, 1e-300));
  };
  auto gradient = [&](const Eigen::VectorXd& eta) {
    const double h = 1e-5;
    Eigen::VectorXd g(m);
    Eigen::VectorXd e = eta;
    for (int j = 0; j < m; ++j) {
      e[j] = eta[j] + h;
      const double fp = objective(e);
      e[j] = eta[j] - h;
      const double fm = objective(e);
      e[j] = eta[j];
      g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  // BFGS in the unconstrained eta = log tau parameterization.
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(m, m);
  double f = objective(eta);
  Eigen::VectorXd g = gradient(eta);
  bool converged = false;
  for (int iter = 0; iter < 2000; ++iter) {
    if (g.norm() < 1e-6) {
      converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {  // reset on a non-descent direction
      hinv.setIdentity();
      dir = -g;
    }
    double alpha = 1.0;
    double f_new = f;
    Eigen::VectorXd eta_new = eta;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      eta_new = eta + alpha * dir;
      f_new = objective(eta_new);
      if (f_new <= f + 1e-4 * alpha * dir.dot(g)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd g_new = gradient(eta_new);
    const Eigen::VectorXd s = eta_new - eta;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(m, m);
      const Eigen::MatrixXd left = i - s * y.transpose() / sy;
      hinv = left * hinv * left.transpose() + s * s.transpose() / sy;
    }
    eta = eta_new;
    f = f_new;
    g = g_new;
  }

  NullConstruction out;
  out.kind = NullConstruction::Kind::Inflation;
  out.converged = converged;
  out.tau = eta.array().exp();
  out.kl = kl_divergence(out.tau);
  Eigen::MatrixXd scaled = frame.scores;
  for (int j = 0; j < m; ++j) scaled.col(j) *= out.tau[j];
  out.curves.basis = centered.basis;
  out.curves.coefficients = scaled * frame.psi;
  out.achieved_rho1 =
      analyze_coefficients(out.curves, rule, sub).rotation.correlations[0];
  return out;
}

PeriodicityTestResult bootstrap_test(const RawCurveSet& raw,
                                     const TestConfig& config) {
  raw.validate();
  if (config.b < 100)
    throw std::invalid_argument("bootstrap needs at least 100 replicates");
  const int n = raw.n_points();
  const int n_curves = raw.n_curves();
  const double span = config.time_span > 0.0
                          ? config.time_span
                          : raw.times[n - 1] + (raw.times[1] - raw.times[0]);
  const int n_basis = config.n_basis > 0 ? config.n_basis : n - 1;
  const FourierBasis basis = make_basis(span, n_basis, true);
  const PeriodicSubBasis sub = periodic_sub_basis(basis, config.years, config.p);

  const SmoothingFit fit = smooth(raw, basis, config.lambda_grid);
  const CoeffAnalysis analysis =
      analyze_coefficients(fit.sample, config.rule, sub);

  NullConstruction null_set =
      config.null_kind == NullConstruction::Kind::Replacement
          ? replacement_null(analysis.centered, analysis.full,
                             analysis.rotation, config.rule, sub)
          : inflation_null(analysis.centered, analysis.full, analysis.rotation,
                           config.rule, sub, config.lambda_penalty);

  const Eigen::MatrixXd phi = basis.eval_matrix(raw.times);
  const Eigen::MatrixXd null_values =
      null_set.curves.coefficients * phi.transpose();  // N x n
  Eigen::LDLT<Eigen::MatrixXd> ldlt(phi.transpose() * phi +
                                    fit.lambda * basis.curvature_penalty());

  PeriodicityTestResult result;
  result.observed_rho1 = analysis.rotation.correlations[0];
  result.b = config.b;
  result.seed = config.seed;
  result.rule = config.rule;
  result.null_achieved_rho1 = null_set.achieved_rho1;

  for (int b = 1; b <= config.b; ++b) {
    try {
      Rng rng(Rng::derive(config.seed, static_cast<std::uint64_t>(b)));
      Eigen::MatrixXd values(n_curves, n);
      for (int i = 0; i < n_curves; ++i)
        values.row(i) = null_values.row(
            static_cast<Eigen::Index>(rng.next_index(n_curves)));
      for (int i = 0; i < n_curves; ++i)
        values.row(i) += fit.residuals.row(
            static_cast<Eigen::Index>(rng.next_index(n_curves)));

      FunctionalSample smoothed;
      if (config.reselect_lambda) {
        RawCurveSet rep{raw.times, values, {}};
        smoothed = smooth(rep, basis, config.lambda_grid).sample;
      } else {
        smoothed.basis = basis;
        smoothed.coefficients =
            ldlt.solve(phi.transpose() * values.transpose()).transpose();
      }
      const CoeffAnalysis rep = analyze_coefficients(smoothed, config.rule, sub);
      result.bootstrap_rho1.push_back(rep.rotation.correlations[0]);
    } catch (const std::exception& e) {
      throw numerical_error("bootstrap replicate " + std::to_string(b) +
                            " failed: " + e.what());
    }
  }

  int below = 0;
  for (double r : result.bootstrap_rho1)
    if (r <= result.observed_rho1) ++below;
  result.p_value = (1.0 + below) / (config.b + 1.0);
  return result;
}

}  // namespace ppc
