#pragma once

#include <complex>
#include <limits>

namespace tcq {

struct line_params {
  double z0 = 50.0;  // ohm
  double l0 = 0.0;   // H/m
  double c0 = 0.0;   // F/m

  static line_params from_impedance(double z0, double velocity);
  double velocity() const;
  void validate() const;
};

struct coupling_result {
  double gamma1 = 0.0;  // rad/s
  double alpha = 0.0;
  double delta = 0.0;   // rad/s
  double ratio_xz = 0.0;
};

// Gamma1 = phi0^2 |g5_10|^2 Delta / (hbar Z0)
double radiative_rate(std::complex<double> gamma5_01, double delta, const line_params& tl);
double alpha_from_rate(double gamma1, double delta);
// J(omega) = pi alpha omega
double spectral_density(double alpha, double omega);
// g_k (J) for one mode of a line of length L
double mode_coupling(std::complex<double> gamma5_01, double omega_k, const line_params& tl, double length);

inline constexpr double infinite_ratio = std::numeric_limits<double>::infinity();
// |g_x / g_z| = 2 |g5_01| / |g5_11 - g5_00|
double coupling_ratio(std::complex<double> gamma5_01, double gamma5_diag_diff);

// M_eff = M_tls M_tl / L_beta
double effective_mutual(double m_tls, double m_tl, double inv_l_beta);

coupling_result coupling(std::complex<double> gamma5_01, double gamma5_diag_diff, double delta,
                         const line_params& tl);

}  // namespace tcq
