#include "ppc/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppc/errors.hpp"

namespace ppc {

void RawCurveSet::validate() const {
  if (values.rows() < 1 || values.cols() < 1)
    throw std::invalid_argument("curve set is empty");
  if (times.size() != values.cols())
    throw std::invalid_argument("time grid length does not match value columns");
  for (Eigen::Index j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != values.rows())
    throw std::invalid_argument("id count does not match curve count");
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  const double lo = -8.0, hi = 4.0;
  const int n = 25;
  for (int i = 0; i < n; ++i)
    grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (n - 1)));
  return grid;
}

namespace {

struct GcvEval {
  double gcv = std::numeric_limits<double>::infinity();
  double edf = 0.0;
};

// Evaluate the summed GCV score for one lambda.  yt is n x N.
GcvEval eval_gcv(double lambda, const Eigen::MatrixXd& phi,
                 const Eigen::MatrixXd& gram, const Eigen::MatrixXd& penalty,
                 const Eigen::MatrixXd& yt) {
  const Eigen::Index n = phi.rows();
  Eigen::MatrixXd m = gram + lambda * penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return {};
  GcvEval out;
  out.edf = ldlt.solve(gram).trace();
  const double denom = static_cast<double>(n) - out.edf;
  if (!(denom > 1e-8)) return {};  // saturated fit, GCV undefined
  const Eigen::MatrixXd coef = ldlt.solve(phi.transpose() * yt);
  const Eigen::MatrixXd resid = yt - phi * coef;
  double gcv = 0.0;
  for (Eigen::Index i = 0; i < resid.cols(); ++i)
    gcv += static_cast<double>(n) * resid.col(i).squaredNorm() / (denom * denom);
  out.gcv = gcv;
  return out;
}

}  // namespace

SmoothingFit smooth(const RawCurveSet& raw, const FourierBasis& basis,
                    const std::vector<double>& lambda_grid) {
  raw.validate();
  if (lambda_grid.empty())
    throw std::invalid_argument("lambda grid must be nonempty");
  for (double l : lambda_grid)
    if (l < 0.0 || !std::isfinite(l))
      throw std::invalid_argument("lambda values must be finite and nonnegative");

  const Eigen::MatrixXd phi = basis.eval_matrix(raw.times);
  const Eigen::MatrixXd gram = phi.transpose() * phi;
  const Eigen::MatrixXd penalty = basis.curvature_penalty();
  const Eigen::MatrixXd yt = raw.values.transpose();  // n x N

  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  if (grid.front() == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (lu.rank() < gram.rows())
      throw singular_system_error(
          "normal equations singular at lambda=0 (rank-deficient design); "
          "use a positive smoothing parameter");
  }

  SmoothingFit fit;
  double best_gcv = std::numeric_limits<double>::infinity();
  double best_lambda = grid.front();
  std::size_t best_pos = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GcvEval e = eval_gcv(grid[i], phi, gram, penalty, yt);
    fit.gcv_trace.emplace_back(grid[i], e.gcv);
    if (e.gcv < best_gcv) {
      best_gcv = e.gcv;
      best_lambda = grid[i];
      best_pos = i;
    }
  }
  // A single candidate needs no selection (GCV may be undefined for a
  // saturated interpolant).
  if (grid.size() > 1 && !std::isfinite(best_gcv))
    throw numerical_error("GCV score undefined on the whole lambda grid");

  // One zoom pass between the neighbors of the grid minimizer.
  if (grid.size() > 1 && std::isfinite(best_gcv)) {
    double lo = best_pos > 0 ? grid[best_pos - 1] : best_lambda / 10.0;
    double hi = best_pos + 1 < grid.size() ? grid[best_pos + 1] : best_lambda * 10.0;
    lo = std::max(lo, best_lambda > 0.0 ? best_lambda * 1e-3 : 1e-12);
    if (hi > lo) {
      for (int i = 1; i <= 10; ++i) {
        const double l = lo * std::pow(hi / lo, i / 11.0);
        const GcvEval e = eval_gcv(l, phi, gram, penalty, yt);
        fit.gcv_trace.emplace_back(l, e.gcv);
        if (e.gcv < best_gcv) {
          best_gcv = e.gcv;
          best_lambda = l;
        }
      }
    }
  }

  const GcvEval chosen = eval_gcv(best_lambda, phi, gram, penalty, yt);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram + best_lambda * penalty);
  const Eigen::MatrixXd coef = ldlt.solve(phi.transpose() * yt);  // K x N

  fit.lambda = best_lambda;
  fit.edf = chosen.edf;
  fit.residuals = raw.values - (phi * coef).transpose();
  fit.sample.basis = basis;
  fit.sample.coefficients = coef.transpose();
  return fit;
}

FunctionalSample demean_timeseries(const FunctionalSample& sample) {
  if (!sample.basis.has_constant())
    throw invalid_state_error("time-series demeaning requires the constant basis function");
  FunctionalSample out = sample;
  out.coefficients.col(sample.basis.position(0)).setZero();
  out.demeaned = true;
  return out;
}

FunctionalSample center_crosssection(const FunctionalSample& sample) {
  if (sample.n_curves() < 2)
    throw insufficient_data_error("cross-section centering needs at least two curves");
  FunctionalSample out = sample;
  out.mean = sample.coefficients.colwise().mean();
  out.coefficients.rowwise() -= out.mean.transpose();
  out.centered = true;
  return out;
}

}  // namespace ppc
