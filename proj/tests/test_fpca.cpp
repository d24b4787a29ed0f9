#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ppc/errors.hpp"
#include "ppc/fpca.hpp"
#include "ppc/rng.hpp"
#include "ppc/smoothing.hpp"

using namespace ppc;

namespace {

FunctionalSample random_centered_sample(const FourierBasis& basis, int n,
                                        std::uint64_t seed) {
  Rng rng(seed);
  FunctionalSample s;
  s.basis = basis;
  s.coefficients.resize(n, basis.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < basis.size(); ++j) s.coefficients(i, j) = rng.next_normal();
  s.coefficients.col(basis.position(0)).setZero();
  s.demeaned = true;
  return center_crosssection(s);
}

}  // namespace

TEST_CASE("single direction sample") {
  const FourierBasis basis = make_basis(1.0, 4, false);
  FunctionalSample s;
  s.basis = basis;
  s.coefficients = Eigen::MatrixXd::Zero(2, basis.size());
  s.coefficients(0, basis.position(1)) = -1.0;
  s.coefficients(1, basis.position(1)) = 1.0;
  s.centered = true;  // mean is already zero

  const FpcaResult res = fpca(s);
  CHECK(res.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));  // 2/(N-1)
  CHECK(res.eigenvalues.tail(res.eigenvalues.size() - 1).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(std::abs(res.components(0, basis.position(1))) ==
        doctest::Approx(1.0).epsilon(1e-12));

  FunctionalSample uncentered = s;
  uncentered.centered = false;
  CHECK_THROWS_AS(fpca(uncentered), invalid_state_error);
}

TEST_CASE("two generative directions recovered at large N") {
  const FourierBasis basis = make_basis(1.0, 6, false);
  Rng rng(99);
  FunctionalSample s;
  s.basis = basis;
  s.coefficients = Eigen::MatrixXd::Zero(2000, basis.size());
  for (int i = 0; i < 2000; ++i) {
    s.coefficients(i, basis.position(1)) = 2.0 * rng.next_normal();  // var 4
    s.coefficients(i, basis.position(4)) = rng.next_normal();        // var 1
  }
  const FpcaResult res = fpca(center_crosssection(s));
  CHECK(res.eigenvalues[0] == doctest::Approx(4.0).epsilon(0.10));
  CHECK(res.eigenvalues[1] == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("fPCA bookkeeping invariants") {
  const FourierBasis basis = make_basis(2.0, 8, true);
  const FunctionalSample s = random_centered_sample(basis, 40, 17);
  const FpcaResult res = fpca(s);

  // orthonormal components
  const Eigen::MatrixXd g = res.components * res.components.transpose();
  CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <
        1e-10);

  // descending nonnegative eigenvalues matching score variances
  for (int j = 0; j < res.n_components(); ++j) {
    if (j > 0) CHECK(res.eigenvalues[j] <= res.eigenvalues[j - 1] + 1e-14);
    CHECK(res.eigenvalues[j] >= 0.0);
    const double var = res.scores.col(j).squaredNorm() / (s.n_curves() - 1);
    if (res.eigenvalues[j] > 1e-12)
      CHECK(var == doctest::Approx(res.eigenvalues[j]).epsilon(1e-8));
  }

  // completeness: scores reconstruct every curve
  const Eigen::MatrixXd recon = res.scores * res.components;
  CHECK((recon - s.coefficients).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rank-r data has exactly r positive eigenvalues") {
  const FourierBasis basis = make_basis(1.0, 10, false);
  Rng rng(31);
  FunctionalSample s;
  s.basis = basis;
  s.coefficients = Eigen::MatrixXd::Zero(30, basis.size());
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 3; ++j)
      s.coefficients(i, basis.position(j + 1)) = rng.next_normal();
  const FpcaResult res = fpca(center_crosssection(s));
  CHECK(res.n_positive() == 3);
}

TEST_CASE("deterministic sign convention") {
  const FourierBasis basis = make_basis(1.0, 6, false);
  const FunctionalSample s = random_centered_sample(
      make_basis(1.0, 6, true), 25, 3);
  const FpcaResult a = fpca(s);
  const FpcaResult b = fpca(s);
  CHECK((a.components - b.components).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 0; j < a.n_components(); ++j) {
    Eigen::Index best;
    a.components.row(j).cwiseAbs().maxCoeff(&best);
    CHECK(a.components(j, best) > 0.0);
  }
}

TEST_CASE("truncation rules") {
  FpcaResult res;
  res.basis = make_basis(1.0, 4, false);
  res.components = Eigen::MatrixXd::Identity(4, 4);
  res.eigenvalues.resize(4);
  res.eigenvalues << 3.0, 1.0, 0.0, 0.0;
  res.scores = Eigen::MatrixXd::Zero(5, 4);
  res.total_variance = 4.0;

  CHECK(select_components(res, TruncationRule::by_fraction(1.0)) == 2);
  CHECK(select_components(res, TruncationRule::by_fraction(0.75)) == 1);
  CHECK(select_components(res, TruncationRule::by_count(3)) == 3);
  CHECK_THROWS_AS(select_components(res, TruncationRule::by_count(9)),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_components(res, TruncationRule::by_fraction(0.0)),
                  std::invalid_argument);

  const FpcaResult t = truncate(res, TruncationRule::by_count(2));
  CHECK(t.n_components() == 2);
  CHECK(t.total_variance == 4.0);
}

TEST_CASE("varimax fixed point on a block-sparse loading matrix") {
  // components supported on disjoint halves of the grid: already maximally
  // simple, so the criterion cannot improve
  const FourierBasis basis = make_basis(1.0, 4, false);
  FpcaResult res;
  res.basis = basis;
  res.components = Eigen::MatrixXd::Identity(4, 4);
  res.eigenvalues.resize(4);
  res.eigenvalues << 4.0, 3.0, 2.0, 1.0;
  res.scores = Eigen::MatrixXd::Zero(5, 4);
  res.total_variance = 10.0;

  Eigen::VectorXd grid(8);
  for (int j = 0; j < 8; ++j) grid[j] = j / 8.0;
  const VarimaxResult vr = varimax(res, 2, grid);
  CHECK(vr.converged);
  CHECK(vr.criterion_trace.back() >=
        vr.criterion_trace.front() - 1e-10);
  // rotation orthonormal
  const Eigen::MatrixXd tt = vr.rotation * vr.rotation.transpose();
  CHECK((tt - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("varimax recovers a randomly rotated sparse configuration") {
  // build sparse loadings, rotate them away, check VARIMAX restores the
  // criterion value of the sparse configuration
  const int m = 2, n = 30;
  const FourierBasis basis = make_basis(1.0, 40, false);
  Eigen::VectorXd grid(n);
  for (int j = 0; j < n; ++j) grid[j] = j / static_cast<double>(n);
  const Eigen::MatrixXd phi = basis.eval_matrix(grid);

  // two smooth "bump-like" directions concentrated on separate halves,
  // constructed from interpolation of block indicators, then orthonormalized
  Eigen::MatrixXd target(m, n);
  target.setZero();
  for (int j = 0; j < n / 2; ++j) target(0, j) = 1.0;
  for (int j = n / 2; j < n; ++j) target(1, j) = 1.0;
  Eigen::MatrixXd coeff =
      (phi.transpose() * phi).ldlt().solve(phi.transpose() * target.transpose())
          .transpose();  // m x K
  // orthonormalize rows
  coeff.row(0) /= coeff.row(0).norm();
  coeff.row(1) -= coeff.row(0).dot(coeff.row(1)) * coeff.row(0);
  coeff.row(1) /= coeff.row(1).norm();

  auto criterion = [&](const Eigen::MatrixXd& c) {
    const Eigen::MatrixXd a = c * phi.transpose();
    double crit = 0.0;
    for (int i = 0; i < m; ++i) {
      const Eigen::ArrayXd sq = a.row(i).array().square();
      crit += sq.square().sum() - sq.sum() * sq.sum() / n;
    }
    return crit;
  };
  const double sparse_crit = criterion(coeff);

  Rng rng(8);
  const Eigen::MatrixXd q = oracle::random_rotation(m, rng);
  FpcaResult res;
  res.basis = basis;
  res.components = q * coeff;
  res.eigenvalues = Eigen::VectorXd::Ones(m);
  res.scores = Eigen::MatrixXd::Zero(5, m);
  res.total_variance = m;

  const VarimaxResult vr = varimax(res, m, grid);
  CHECK(criterion(vr.rotated_components) >= sparse_crit - 1e-6);
}

TEST_CASE("rotation preserves subspace variance") {
  const FourierBasis basis = make_basis(1.0, 8, true);
  const FunctionalSample s = random_centered_sample(basis, 50, 23);
  const FpcaResult res = fpca(s);
  Eigen::VectorXd grid(20);
  for (int j = 0; j < 20; ++j) grid[j] = j / 20.0;
  const int m = 4;
  const VarimaxResult vr = varimax(res, m, grid);
  CHECK(vr.explained_variance.sum() ==
        doctest::Approx(res.eigenvalues.head(m).sum()).epsilon(1e-8));
  // rotated components stay orthonormal
  const Eigen::MatrixXd g = vr.rotated_components * vr.rotated_components.transpose();
  CHECK((g - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
  // score bookkeeping: recomputed variances match T Lambda T'
  const Eigen::MatrixXd sc = s.coefficients * vr.rotated_components.transpose();
  for (int j = 0; j < m; ++j)
    CHECK(sc.col(j).squaredNorm() / (s.n_curves() - 1) ==
          doctest::Approx(vr.explained_variance[j]).epsilon(1e-8));
}
