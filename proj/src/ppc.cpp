#include "ppc/ppc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppc/errors.hpp"

namespace ppc {

namespace {

void fix_sign_row(Eigen::Ref<Eigen::RowVectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-15) best = i;
  if (v[best] < 0.0) v = -v;
}

bool needs_flip(const Eigen::RowVectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-15) best = i;
  return v[best] < 0.0;
}

bool lex_less(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

// Complete the first `rank` orthonormal columns of q to a full square basis,
// drawing new directions from canonical unit vectors in index order.
void complete_basis(Eigen::MatrixXd& q, int rank) {
  const int dim = static_cast<int>(q.rows());
  int filled = rank;
  for (int e = 0; e < dim && filled < dim; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, e);
    for (int j = 0; j < filled; ++j) v -= q.col(j).dot(v) * q.col(j);
    const double norm = v.norm();
    if (norm > 1e-8) q.col(filled++) = v / norm;
  }
}

}  // namespace

PpcResult ppc_rotation(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& f) {
  const int m = static_cast<int>(gamma.rows());
  const int p = static_cast<int>(f.rows());
  if (m < 1 || p < 1) throw std::invalid_argument("empty frame");
  if (gamma.cols() != f.cols())
    throw incompatible_basis_error("frames live in different coordinate spaces");

  const Eigen::MatrixXd cross = gamma * f.transpose();  // Sigma_gamma_f, M x P
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();  // M x M, columns u_j
  Eigen::MatrixXd v = svd.matrixV();  // P x P
  const int n_pairs = std::min(m, p);
  Eigen::VectorXd sigma = svd.singularValues().head(n_pairs);
  for (int j = 0; j < n_pairs; ++j)
    sigma[j] = std::clamp(sigma[j], 0.0, 1.0);

  int rank = 0;
  while (rank < n_pairs && sigma[rank] > 1e-12) ++rank;
  complete_basis(u, rank);
  complete_basis(v, rank);

  // Deterministic order inside tied singular-value blocks: sort by the
  // sign-fixed benchmark coefficient rows.
  for (int a = 0; a < rank;) {
    int b = a + 1;
    while (b < rank && std::abs(sigma[b] - sigma[a]) <= 1e-12) ++b;
    if (b - a > 1) {
      std::vector<int> order(b - a);
      std::iota(order.begin(), order.end(), a);
      std::vector<Eigen::RowVectorXd> thetas(b - a);
      for (int i = a; i < b; ++i) {
        thetas[i - a] = v.col(i).transpose() * f;
        fix_sign_row(thetas[i - a]);
      }
      std::sort(order.begin(), order.end(), [&](int i, int j) {
        return lex_less(thetas[i - a], thetas[j - a]);
      });
      Eigen::MatrixXd ub(u.rows(), b - a), vb(v.rows(), b - a);
      Eigen::VectorXd sb(b - a);
      for (int i = 0; i < b - a; ++i) {
        ub.col(i) = u.col(order[i]);
        vb.col(i) = v.col(order[i]);
        sb[i] = sigma[order[i]];
      }
      u.middleCols(a, b - a) = ub;
      v.middleCols(a, b - a) = vb;
      sigma.segment(a, b - a) = sb;
    }
    a = b;
  }

  // Sign convention: benchmarks carry a positive leading coefficient; paired
  // u columns flip with them so <xi_j, theta_j> stays nonnegative.
  for (int j = 0; j < p; ++j) {
    const Eigen::RowVectorXd theta = v.col(j).transpose() * f;
    if (needs_flip(theta)) {
      v.col(j) = -v.col(j);
      if (j < rank) u.col(j) = -u.col(j);
    }
  }
  for (int j = rank; j < m; ++j) {
    const Eigen::RowVectorXd xi = u.col(j).transpose() * gamma;
    if (needs_flip(xi)) u.col(j) = -u.col(j);
  }

  PpcResult res;
  res.u_hat = u.transpose();
  res.v_hat = v.transpose();
  res.ppcs = u.transpose() * gamma;
  res.benchmarks = v.transpose() * f;
  res.correlations = sigma;
  res.n_pairs = n_pairs;
  return res;
}

PpcResult ppc_rotation(const FpcaResult& truncated, const PeriodicSubBasis& sub) {
  if (!(truncated.basis == sub.parent))
    throw incompatible_basis_error("fPC components and periodic sub-basis use different bases");
  return ppc_rotation(truncated.components, sub.coefficient_rows());
}

PpcResult ppc_rotation_general(const Eigen::MatrixXd& gamma,
                               const Eigen::MatrixXd& f,
                               const Eigen::MatrixXd& sigma_gg,
                               const Eigen::MatrixXd& sigma_ff) {
  auto inv_sqrt = [](const Eigen::MatrixXd& s, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    if (eig.info() != Eigen::Success)
      throw numerical_error("gram matrix eigen-decomposition failed");
    const auto& d = eig.eigenvalues();
    if (!(d.minCoeff() > 0.0) || d.minCoeff() / d.maxCoeff() < 1e-10)
      throw singular_system_error(std::string(what) +
                                  " gram matrix is numerically singular");
    return Eigen::MatrixXd(eig.eigenvectors() *
                           d.array().rsqrt().matrix().asDiagonal() *
                           eig.eigenvectors().transpose());
  };
  const Eigen::MatrixXd wg = inv_sqrt(sigma_gg, "component");
  const Eigen::MatrixXd wf = inv_sqrt(sigma_ff, "reference");
  PpcResult res = ppc_rotation(wg * gamma, wf * f);
  res.u_hat = res.u_hat * wg;
  res.v_hat = res.v_hat * wf;
  return res;
}

Eigen::MatrixXd score_matrix(const FunctionalSample& sample,
                             const FourierBasis& component_basis,
                             const Eigen::MatrixXd& components) {
  if (!(sample.basis == component_basis))
    throw incompatible_basis_error("scores: sample and components use different bases");
  return sample.coefficients * components.transpose();
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> scores(
    const FunctionalSample& sample, const FourierBasis& component_basis,
    const Eigen::MatrixXd& components) {
  Eigen::MatrixXd s = score_matrix(sample, component_basis, components);
  const int n = static_cast<int>(s.rows());
  if (n < 2)
    throw insufficient_data_error("score variances need at least two curves");
  Eigen::VectorXd var =
      s.colwise().squaredNorm().transpose() / static_cast<double>(n - 1);
  return {std::move(s), std::move(var)};
}

namespace {

Eigen::VectorXd cumsum(const Eigen::VectorXd& v) {
  Eigen::VectorXd c(v.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) c[i] = (acc += v[i]);
  return c;
}

}  // namespace

VarianceDecomposition variance_decomposition(const FunctionalSample& sample,
                                             const FpcaResult& truncated,
                                             const PpcResult& rotation,
                                             const VarimaxResult* vm) {
  VarianceDecomposition d;
  d.lambda_gamma =
      scores(sample, truncated.basis, truncated.components).second;
  d.lambda_xi = scores(sample, truncated.basis, rotation.ppcs).second;
  d.lambda_theta =
      scores(sample, truncated.basis, rotation.benchmarks.topRows(rotation.n_pairs))
          .second;
  if (vm != nullptr)
    d.lambda_nu = scores(sample, truncated.basis, vm->rotated_components).second;
  d.cum_gamma = cumsum(d.lambda_gamma);
  d.cum_xi = cumsum(d.lambda_xi);
  d.cum_theta = cumsum(d.lambda_theta);
  if (d.lambda_nu.size() > 0) d.cum_nu = cumsum(d.lambda_nu);
  return d;
}

AiDiagnostic annual_information(const VarianceDecomposition& decomp) {
  const int n = static_cast<int>(decomp.lambda_theta.size());
  if (n < 1) throw std::invalid_argument("annual information needs at least one pair");
  AiDiagnostic diag;
  for (int j = 0; j < n; ++j) {
    const double denom = decomp.cum_xi[j];
    diag.ai.push_back(denom > 0.0
                          ? decomp.cum_theta[j] / denom
                          : std::numeric_limits<double>::quiet_NaN());
  }
  // Advisory elbow: largest j whose AI drop exceeds twice the median drop.
  std::vector<double> drops;
  for (int j = 0; j + 1 < n; ++j)
    if (std::isfinite(diag.ai[j]) && std::isfinite(diag.ai[j + 1]))
      drops.push_back(diag.ai[j] - diag.ai[j + 1]);
  diag.suggested_j = n;
  if (!drops.empty()) {
    std::vector<double> sorted = drops;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (int j = static_cast<int>(drops.size()) - 1; j >= 0; --j) {
      if (drops[j] > 2.0 * median && drops[j] > 0.0) {
        diag.suggested_j = j + 1;
        break;
      }
    }
  }
  return diag;
}

Decomposition decompose(const FunctionalSample& sample,
                        const PpcResult& rotation, const FpcaResult& full,
                        int j_cut) {
  const int m = rotation.n_rotated();
  const int k = full.n_positive();
  if (j_cut < 1 || j_cut > m)
    throw std::invalid_argument("nearly-periodic cutoff out of range");
  if (m > k)
    throw std::invalid_argument("rotated component count exceeds positive fPCs");
  const Eigen::MatrixXd& z = sample.coefficients;

  Decomposition out;
  const Eigen::MatrixXd s_xi = z * rotation.ppcs.transpose();  // N x M
  out.nearly_periodic = s_xi.leftCols(j_cut) * rotation.ppcs.topRows(j_cut);
  if (j_cut < m)
    out.aperiodic =
        s_xi.rightCols(m - j_cut) * rotation.ppcs.bottomRows(m - j_cut);
  else
    out.aperiodic = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  if (m < k) {
    const Eigen::MatrixXd trail = full.components.middleRows(m, k - m);
    out.remainder = (z * trail.transpose()) * trail;
  } else {
    out.remainder = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  }
  out.mean = sample.mean.size() == z.cols()
                 ? sample.mean
                 : Eigen::VectorXd::Zero(z.cols());
  return out;
}

namespace {

double aligned_distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

int closest_row(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& target) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double d = aligned_distance(rows.row(i), target);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

StabilityTrace stability_trace(const FpcaResult& full,
                               const PeriodicSubBasis& sub,
                               const std::vector<int>& m_list,
                               const Eigen::VectorXd& eval_grid) {
  if (m_list.size() < 2)
    throw std::invalid_argument("stability trace needs at least two M values");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 2 || m_list[i] > full.n_components())
      throw std::invalid_argument("M value out of range");
    if (i > 0 && m_list[i] <= m_list[i - 1])
      throw std::invalid_argument("M list must be strictly increasing");
  }

  std::vector<Eigen::RowVectorXd> ppc_first, vm_maxvar, vm_chain, vm_first_fpc;
  const Eigen::RowVectorXd gamma1 = full.components.row(0);
  for (int m : m_list) {
    FpcaResult trunc = truncate(full, TruncationRule::by_count(m));
    ppc_first.push_back(ppc_rotation(trunc, sub).ppcs.row(0));

    const VarimaxResult vr = varimax(full, m, eval_grid);
    Eigen::Index argmax = 0;
    vr.explained_variance.maxCoeff(&argmax);
    vm_maxvar.push_back(vr.rotated_components.row(argmax));
    if (vm_chain.empty())
      vm_chain.push_back(vr.rotated_components.row(argmax));
    else
      vm_chain.push_back(vr.rotated_components.row(
          closest_row(vr.rotated_components, vm_chain.back())));
    vm_first_fpc.push_back(
        vr.rotated_components.row(closest_row(vr.rotated_components, gamma1)));
  }

  StabilityTrace trace;
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    trace.m_upper.push_back(m_list[i]);
    trace.ppc_trace.push_back(aligned_distance(ppc_first[i], ppc_first[i - 1]));
    trace.varimax_max_variance.push_back(
        aligned_distance(vm_maxvar[i], vm_maxvar[i - 1]));
    trace.varimax_closest_previous.push_back(
        aligned_distance(vm_chain[i], vm_chain[i - 1]));
    trace.varimax_closest_first_fpc.push_back(
        aligned_distance(vm_first_fpc[i], vm_first_fpc[i - 1]));
  }
  return trace;
}

}  // namespace ppc
