#include "ppc/fourier_basis.hpp"

#include <cmath>
#include <numbers>

#include "ppc/errors.hpp"

namespace ppc {

FourierBasis::FourierBasis(double time_span, int num_functions,
                           bool include_constant)
    : time_span_(time_span),
      num_functions_(num_functions),
      include_constant_(include_constant),
      omega_(2.0 * std::numbers::pi / time_span) {
  if (!(time_span > 0.0)) throw std::invalid_argument("time span must be positive");
  if (num_functions < 1) throw std::invalid_argument("need at least one basis function");
}

int FourierBasis::position(int index) const {
  if (index == 0) {
    if (!include_constant_) throw std::out_of_range("basis has no constant function");
    return 0;
  }
  if (index < 0 || index > num_functions_)
    throw std::out_of_range("basis index out of range");
  return index - 1 + (include_constant_ ? 1 : 0);
}

int FourierBasis::index_at(int position) const {
  if (position < 0 || position >= size())
    throw std::out_of_range("basis position out of range");
  if (include_constant_) return position;
  return position + 1;
}

int FourierBasis::frequency_at(int position) const {
  const int index = index_at(position);
  return (index + 1) / 2;  // sin(kwt) -> 2k-1, cos(kwt) -> 2k, constant -> 0
}

double FourierBasis::eval(int index, double t) const {
  if (index == 0) {
    if (!include_constant_) throw std::out_of_range("basis has no constant function");
    return 1.0 / std::sqrt(time_span_);
  }
  if (index < 0 || index > num_functions_)
    throw std::out_of_range("basis index out of range");
  const int k = (index + 1) / 2;
  const double scale = std::sqrt(2.0 / time_span_);
  const double arg = k * omega_ * t;
  return (index % 2 == 1) ? scale * std::sin(arg) : scale * std::cos(arg);
}

double FourierBasis::eval_at_position(int position, double t) const {
  return eval(index_at(position), t);
}

Eigen::MatrixXd FourierBasis::eval_matrix(const Eigen::VectorXd& times) const {
  Eigen::MatrixXd phi(times.size(), size());
  for (int p = 0; p < size(); ++p)
    for (Eigen::Index i = 0; i < times.size(); ++i)
      phi(i, p) = eval_at_position(p, times[i]);
  return phi;
}

Eigen::MatrixXd FourierBasis::curvature_penalty() const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(size(), size());
  for (int p = 0; p < size(); ++p) {
    const double kw = frequency_at(p) * omega_;
    r(p, p) = kw * kw * kw * kw;
  }
  return r;
}

FourierBasis make_basis(double time_span, int num_functions,
                        bool include_constant) {
  return FourierBasis(time_span, num_functions, include_constant);
}

PeriodicSubBasis periodic_sub_basis(const FourierBasis& basis, int years,
                                    int count) {
  if (years < 1) throw std::invalid_argument("years must be positive");
  if (count < 2 || count % 2 != 0)
    throw std::invalid_argument("periodic sub-basis size must be even and positive");
  PeriodicSubBasis sub;
  sub.parent = basis;
  sub.years = years;
  sub.count = count;
  for (int m = 1; m <= count / 2; ++m) {
    const int k = years * m;
    if (2 * k > basis.num_functions())
      throw std::out_of_range("requested periodic frequency exceeds basis saturation");
    sub.indices.push_back(2 * k - 1);
    sub.indices.push_back(2 * k);
  }
  return sub;
}

Eigen::MatrixXd PeriodicSubBasis::coefficient_rows() const {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(count, parent.size());
  for (int j = 0; j < count; ++j) rows(j, parent.position(indices[j])) = 1.0;
  return rows;
}

Eigen::MatrixXd gram_matrix(const FourierBasis& basis_a,
                            const Eigen::MatrixXd& a,
                            const FourierBasis& basis_b,
                            const Eigen::MatrixXd& b) {
  if (!(basis_a == basis_b))
    throw incompatible_basis_error("gram_matrix: function sets use different bases");
  if (a.cols() != basis_a.size() || b.cols() != basis_b.size())
    throw incompatible_basis_error("gram_matrix: coefficient width does not match basis");
  return a * b.transpose();
}

}  // namespace ppc
