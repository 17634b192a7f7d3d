#include "tcq/coupling.hpp"

#include <cmath>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

line_params line_params::from_impedance(double z0, double velocity) {
  return {z0, z0 / velocity, 1.0 / (z0 * velocity)};
}

double line_params::velocity() const { return 1.0 / std::sqrt(l0 * c0); }

void line_params::validate() const {
  if (!(z0 > 0) || !(l0 > 0) || !(c0 > 0)) throw config_error("line parameters must be positive");
  if (std::abs(std::sqrt(l0 / c0) - z0) > 1e-9 * z0) throw config_error("z0 differs from sqrt(l0/c0)");
}

double radiative_rate(std::complex<double> gamma5_01, double delta, const line_params& tl) {
  if (!(delta > 0)) throw config_error("gap must be positive");
  const double phi0 = constants::phi0;
  return phi0 * phi0 * std::norm(gamma5_01) * delta / (constants::hbar * tl.z0);
}

double alpha_from_rate(double gamma1, double delta) {
  if (!(delta > 0)) throw config_error("gap must be positive");
  return gamma1 / (constants::pi * delta);
}

double spectral_density(double alpha, double omega) {
  if (omega < 0) throw config_error("spectral density needs omega >= 0");
  return constants::pi * alpha * omega;
}

double mode_coupling(std::complex<double> gamma5_01, double omega_k, const line_params& tl, double length) {
  if (!(length > 0)) throw config_error("line length must be positive");
  const double v = tl.velocity();
  return constants::phi0 * std::abs(gamma5_01) / tl.l0 / std::sqrt(length) *
         std::sqrt(constants::hbar * omega_k / (2.0 * tl.c0 * v * v));
}

double coupling_ratio(std::complex<double> gamma5_01, double gamma5_diag_diff) {
  if (gamma5_diag_diff == 0.0) return infinite_ratio;
  return 2.0 * std::abs(gamma5_01) / std::abs(gamma5_diag_diff);
}

double effective_mutual(double m_tls, double m_tl, double inv_l_beta) { return m_tls * m_tl * inv_l_beta; }

coupling_result coupling(std::complex<double> gamma5_01, double gamma5_diag_diff, double delta,
                         const line_params& tl) {
  coupling_result r;
  r.delta = delta;
  r.gamma1 = radiative_rate(gamma5_01, delta, tl);
  r.alpha = alpha_from_rate(r.gamma1, delta);
  r.ratio_xz = coupling_ratio(gamma5_01, gamma5_diag_diff);
  return r;
}

}  // namespace tcq
