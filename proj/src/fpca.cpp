#include "ppc/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppc/errors.hpp"

namespace ppc {

namespace {

// Flip so the coefficient of largest magnitude is positive; ties broken by
// the lowest index.
void fix_sign(Eigen::MatrixXd& m, int row) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m.cols(); ++i)
    if (std::abs(m(row, i)) > std::abs(m(row, best)) + 1e-15) best = i;
  if (m(row, best) < 0.0) m.row(row) = -m.row(row);
}

bool lex_less(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace

int FpcaResult::n_positive() const {
  const double floor = 1e-10 * total_variance;
  int r = 0;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
    if (eigenvalues[j] > floor) ++r;
  return r;
}

FpcaResult fpca(const FunctionalSample& sample) {
  if (!sample.centered)
    throw invalid_state_error("fpca requires a cross-section centered sample");
  const Eigen::MatrixXd& z = sample.coefficients;
  const int n = static_cast<int>(z.rows());
  if (n < 2) throw insufficient_data_error("fpca needs at least two curves");

  const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw numerical_error("eigen-decomposition failed");

  const int k = static_cast<int>(cov.rows());
  FpcaResult res;
  res.basis = sample.basis;
  res.eigenvalues.resize(k);
  res.components.resize(k, k);
  for (int j = 0; j < k; ++j) {
    double lam = eig.eigenvalues()[k - 1 - j];  // descending
    if (lam < 0.0 && lam >= -1e-12) lam = 0.0;
    if (lam < 0.0) lam = 0.0;
    res.eigenvalues[j] = lam;
    res.components.row(j) = eig.eigenvectors().col(k - 1 - j).transpose();
    fix_sign(res.components, j);
  }

  // Deterministic order inside tied eigenvalue blocks.
  for (int a = 0; a < k;) {
    int b = a + 1;
    while (b < k && std::abs(res.eigenvalues[b] - res.eigenvalues[a]) <= 1e-12) ++b;
    if (b - a > 1) {
      std::vector<int> order(b - a);
      std::iota(order.begin(), order.end(), a);
      std::sort(order.begin(), order.end(), [&](int i, int j) {
        return lex_less(res.components.row(i), res.components.row(j));
      });
      Eigen::MatrixXd block(b - a, k);
      for (int i = 0; i < b - a; ++i) block.row(i) = res.components.row(order[i]);
      res.components.middleRows(a, b - a) = block;
    }
    a = b;
  }

  res.scores = z * res.components.transpose();
  res.total_variance = res.eigenvalues.sum();
  return res;
}

int select_components(const FpcaResult& result, const TruncationRule& rule) {
  if (rule.kind == TruncationRule::Kind::Count) {
    if (rule.count < 1 || rule.count > result.n_components())
      throw std::invalid_argument("component count out of range");
    return rule.count;
  }
  if (!(rule.fraction > 0.0 && rule.fraction <= 1.0))
    throw std::invalid_argument("variance fraction must be in (0, 1]");
  const int positive = result.n_positive();
  double cum = 0.0;
  for (int m = 1; m <= positive; ++m) {
    cum += result.eigenvalues[m - 1];
    if (cum / result.total_variance >= rule.fraction - 1e-12) return m;
  }
  return positive;
}

FpcaResult truncate(const FpcaResult& result, const TruncationRule& rule) {
  const int m = select_components(result, rule);
  FpcaResult out;
  out.basis = result.basis;
  out.components = result.components.topRows(m);
  out.eigenvalues = result.eigenvalues.head(m);
  out.scores = result.scores.leftCols(m);
  out.total_variance = result.total_variance;
  return out;
}

namespace {

double varimax_criterion(const Eigen::MatrixXd& a) {
  const double n = static_cast<double>(a.cols());
  double crit = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Eigen::ArrayXd sq = a.row(i).array().square();
    crit += sq.square().sum() - sq.sum() * sq.sum() / n;
  }
  return crit;
}

}  // namespace

VarimaxResult varimax(const FpcaResult& result, int m,
                      const Eigen::VectorXd& eval_grid, bool kaiser) {
  if (m < 2) throw std::invalid_argument("varimax needs at least two components");
  if (m > result.n_components())
    throw std::invalid_argument("varimax: m exceeds available components");
  if (eval_grid.size() < m)
    throw std::invalid_argument("varimax: evaluation grid smaller than m");

  const Eigen::MatrixXd phi = result.basis.eval_matrix(eval_grid);  // n x K
  Eigen::MatrixXd b = result.components.topRows(m) * phi.transpose();  // M x n
  Eigen::VectorXd row_norms = Eigen::VectorXd::Ones(eval_grid.size());
  if (kaiser) {
    // normalize grid columns by communality
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const double h = b.col(j).norm();
      if (h > 0) {
        row_norms[j] = h;
        b.col(j) /= h;
      }
    }
  }

  const int n = static_cast<int>(b.cols());
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd a = b;
  VarimaxResult vr;
  vr.criterion_trace.push_back(varimax_criterion(a));
  vr.converged = false;
  const int max_sweeps = 500;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int p = 0; p < m - 1; ++p) {
      for (int q = p + 1; q < m; ++q) {
        double su = 0, sv = 0, suu_vv = 0, suv = 0;
        for (int j = 0; j < n; ++j) {
          const double u = a(p, j) * a(p, j) - a(q, j) * a(q, j);
          const double v = 2.0 * a(p, j) * a(q, j);
          su += u;
          sv += v;
          suu_vv += u * u - v * v;
          suv += u * v;
        }
        const double num = 2.0 * (suv - su * sv / n);
        const double den = suu_vv - (su * su - sv * sv) / n;
        if (std::abs(num) < 1e-14 && std::abs(den) < 1e-14) continue;
        const double angle = 0.25 * std::atan2(num, den);
        if (std::abs(angle) < 1e-12) continue;
        const double c = std::cos(angle), s = std::sin(angle);
        const Eigen::RowVectorXd ap = a.row(p), aq = a.row(q);
        a.row(p) = c * ap + s * aq;
        a.row(q) = -s * ap + c * aq;
        const Eigen::RowVectorXd tp = t.row(p), tq = t.row(q);
        t.row(p) = c * tp + s * tq;
        t.row(q) = -s * tp + c * tq;
      }
    }
    const double crit = varimax_criterion(a);
    const double prev = vr.criterion_trace.back();
    vr.criterion_trace.push_back(std::max(crit, prev));
    if (crit - prev < 1e-10) {
      vr.converged = true;
      break;
    }
  }

  vr.rotation = t;
  vr.rotated_components = t * result.components.topRows(m);
  const Eigen::MatrixXd lam = result.eigenvalues.head(m).asDiagonal();
  vr.explained_variance = (t * lam * t.transpose()).diagonal();
  return vr;
}

}  // namespace ppc
