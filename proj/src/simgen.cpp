#include "ppc/simgen.hpp"

#include <cmath>
#include <string>

#include "ppc/errors.hpp"
#include "ppc/rng.hpp"

namespace ppc {

GeneratedSet generate(const SchemeConfig& config) {
  if (config.scheme != 1 && config.scheme != 2)
    throw std::invalid_argument("scheme must be 1 or 2");
  if (config.n_curves < 1 || config.n_grid < 2 || !(config.time_span > 0.0) ||
      config.years < 1 || config.level < 0.0 || config.noise_sd < 0.0)
    throw std::invalid_argument("invalid generator configuration");
  if (config.scheme == 2 && config.hfd_freq % config.years == 0)
    throw std::invalid_argument(
        "disturbance frequency must not be a multiple of the cycle count");

  // Generating frequencies: plain-unit-variance block, then the sqrt(L)
  // scaled pair.
  std::vector<int> unit_freqs, scaled_freqs;
  int max_freq;
  if (config.scheme == 1) {
    unit_freqs = {1, 2, 3};
    scaled_freqs = {config.years};
    max_freq = config.years;
  } else {
    unit_freqs = {1, 2, 3, 4};
    scaled_freqs = {config.hfd_freq};
    max_freq = config.hfd_freq;
  }

  const FourierBasis basis = make_basis(config.time_span, 2 * max_freq, true);
  // Unnormalized sin/cos draws convert to orthonormal units by sqrt(T/2).
  const double unit_scale = std::sqrt(config.time_span / 2.0);

  Rng rng(Rng::derive(config.seed, 0));
  Eigen::MatrixXd coeff =
      Eigen::MatrixXd::Zero(config.n_curves, basis.size());
  for (int i = 0; i < config.n_curves; ++i) {
    for (int k : unit_freqs) {
      coeff(i, basis.position(2 * k - 1)) = unit_scale * rng.next_normal();
      coeff(i, basis.position(2 * k)) = unit_scale * rng.next_normal();
    }
    const double amp = std::sqrt(config.level) * unit_scale;
    for (int k : scaled_freqs) {
      coeff(i, basis.position(2 * k - 1)) = amp * rng.next_normal();
      coeff(i, basis.position(2 * k)) = amp * rng.next_normal();
    }
  }

  GeneratedSet out;
  out.truth.basis = basis;
  out.truth.coefficients = coeff;
  out.truth.demeaned = true;  // no constant term is generated

  out.raw.times.resize(config.n_grid);
  for (int j = 0; j < config.n_grid; ++j)
    out.raw.times[j] = config.time_span * j / config.n_grid;
  out.raw.values = coeff * basis.eval_matrix(out.raw.times).transpose();
  if (config.noise_sd > 0.0) {
    for (Eigen::Index i = 0; i < out.raw.values.rows(); ++i)
      for (Eigen::Index j = 0; j < out.raw.values.cols(); ++j)
        out.raw.values(i, j) += config.noise_sd * rng.next_normal();
  }
  out.raw.ids.reserve(config.n_curves);
  for (int i = 0; i < config.n_curves; ++i)
    out.raw.ids.push_back("curve_" + std::to_string(i));
  return out;
}

std::vector<double> level_grid(int scheme) {
  if (scheme == 1) return {0.0, 0.6, 0.8, 1.0, 1.1, 1.3};
  if (scheme == 2) return {0.5, 1.0, 5.0, 10.0};
  throw std::invalid_argument("scheme must be 1 or 2");
}

}  // namespace ppc
