#pragma once

// Independent numerical oracles used only by tests: quadrature inner
// products, a hand-rolled Jacobi eigen solver, and principal angles computed
// without going through the library's rotation code.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "ppc/fourier_basis.hpp"
#include "ppc/rng.hpp"

namespace oracle {

// Composite Simpson quadrature of f on [0, span].
inline double quadrature(const std::function<double(double)>& f, double span,
                         int n_intervals = 10000) {
  if (n_intervals % 2 != 0) ++n_intervals;
  const double h = span / n_intervals;
  double acc = f(0.0) + f(span);
  for (int i = 1; i < n_intervals; ++i)
    acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Inner product of two coefficient-vector functions by quadrature.
inline double inner_product_quad(const ppc::FourierBasis& basis,
                                 const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b,
                                 int n_intervals = 10000) {
  auto eval = [&](const Eigen::VectorXd& c, double t) {
    double v = 0.0;
    for (int p = 0; p < basis.size(); ++p) v += c[p] * basis.eval_at_position(p, t);
    return v;
  };
  return quadrature([&](double t) { return eval(a, t) * eval(b, t); },
                    basis.time_span(), n_intervals);
}

// Central-difference second derivative of a single basis function.
inline double second_derivative(const ppc::FourierBasis& basis, int position,
                                double t, double h = 1e-4) {
  const auto f = [&](double x) { return basis.eval_at_position(position, x); };
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

// Cyclic Jacobi eigen solver for a symmetric matrix; eigenvalues descending.
inline void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& values,
                         Eigen::MatrixXd& vectors) {
  const int n = static_cast<int>(a.rows());
  vectors = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
        j(p, p) = c;
        j(q, q) = c;
        j(p, q) = s;
        j(q, p) = -s;
        a = j.transpose() * a * j;
        vectors = vectors * j;
      }
    }
  }
  values.resize(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i) > a(j, j); });
  Eigen::MatrixXd sorted(n, n);
  for (int i = 0; i < n; ++i) {
    values[i] = a(order[i], order[i]);
    sorted.col(i) = vectors.col(order[i]);
  }
  vectors = sorted;
}

// Cosines of the principal angles between the row spaces of two
// row-orthonormal frames, via Jacobi eigenvalues of G'G with G = A B'.
inline Eigen::VectorXd principal_angle_cosines(const Eigen::MatrixXd& a,
                                               const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd g = a * b.transpose();
  const Eigen::MatrixXd gtg = g.transpose() * g;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  jacobi_eigen(gtg, values, vectors);
  const int n = std::min<int>(static_cast<int>(a.rows()),
                              static_cast<int>(b.rows()));
  Eigen::VectorXd cosines(n);
  for (int i = 0; i < n; ++i)
    cosines[i] = std::sqrt(std::max(values[i], 0.0));
  return cosines;
}

// Random row-orthonormal frame (rows x dim) via Gram-Schmidt on Gaussians.
inline Eigen::MatrixXd random_frame(int rows, int dim, ppc::Rng& rng) {
  Eigen::MatrixXd m(rows, dim);
  for (int i = 0; i < rows; ++i) {
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j) v[j] = rng.next_normal();
    for (int k = 0; k < i; ++k) v -= m.row(k).dot(v) * m.row(k).transpose();
    m.row(i) = v.transpose() / v.norm();
  }
  return m;
}

// Random orthonormal square matrix.
inline Eigen::MatrixXd random_rotation(int dim, ppc::Rng& rng) {
  return random_frame(dim, dim, rng);
}

}  // namespace oracle
