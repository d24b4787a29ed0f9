#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ppc {

// Orthonormal Fourier system on [0, T]:
//   constant      index 0       1/sqrt(T)
//   sin(k w t)    index 2k-1    sqrt(2/T) sin(k w t)
//   cos(k w t)    index 2k      sqrt(2/T) cos(k w t)
// with w = 2 pi / T.  `num_functions` counts the non-constant functions.
class FourierBasis {
 public:
  FourierBasis(double time_span, int num_functions, bool include_constant);

  double time_span() const { return time_span_; }
  double omega() const { return omega_; }
  int num_functions() const { return num_functions_; }
  bool has_constant() const { return include_constant_; }

  // number of stored functions (= num_functions + constant if present)
  int size() const { return num_functions_ + (include_constant_ ? 1 : 0); }

  // storage position of an index, and back
  int position(int index) const;
  int index_at(int position) const;
  int frequency_at(int position) const;  // 0 for the constant

  double eval(int index, double t) const;
  double eval_at_position(int position, double t) const;

  // n x size() evaluation matrix, columns in storage order
  Eigen::MatrixXd eval_matrix(const Eigen::VectorXd& times) const;

  // R_ij = int phi_i'' phi_j'' dt; diagonal with (k w)^4 entries
  Eigen::MatrixXd curvature_penalty() const;

  bool operator==(const FourierBasis&) const = default;

 private:
  double time_span_;
  int num_functions_;
  bool include_constant_;
  double omega_;
};

// The sub-basis of parent functions whose frequency is a multiple of
// `years`, i.e. functions with period time_span / years.
struct PeriodicSubBasis {
  FourierBasis parent{1.0, 1, true};
  int years = 1;
  int count = 0;             // P
  std::vector<int> indices;  // parent indices, ascending

  // P x parent.size() coefficient rows (orthonormal selection)
  Eigen::MatrixXd coefficient_rows() const;
};

FourierBasis make_basis(double time_span, int num_functions,
                        bool include_constant);

PeriodicSubBasis periodic_sub_basis(const FourierBasis& basis, int years,
                                    int count);

// Inner products of two coefficient-row function sets sharing one basis.
Eigen::MatrixXd gram_matrix(const FourierBasis& basis_a,
                            const Eigen::MatrixXd& a,
                            const FourierBasis& basis_b,
                            const Eigen::MatrixXd& b);

}  // namespace ppc
