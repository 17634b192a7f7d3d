#pragma once

#include <array>
#include <complex>

#include "tcq/circuit.hpp"
#include "tcq/coupling.hpp"
#include "tcq/matrix_elements.hpp"
#include "tcq/spectrum.hpp"

namespace tcq {

enum class johnson_convention {
  quantum,    // 2 hbar w / (Z (1 - exp(-hbar w / k T))), one-sided emission
  classical,  // 2 k T / Z
};

struct noise_model {
  double a_eps = 1.44e-12;   // Phi0^2/Hz at 1 Hz
  double a_beta = 1.21e-12;  // Phi0^2/Hz at 1 Hz
  double t_line = 0.3;       // K
  double m_eps = 0.25e-12;   // H
  double m_beta = 0.47e-12;  // H
  double z_line = 50.0;      // ohm
  double x_qp = 5e-7;
  double delta_al = 180e-6 * 1.602176634e-19;  // J
  double f_ir = 1.0;  // Hz
  double f_uv = 1e6;  // Hz
  double gamma10_residual = 0.0;  // rad/s, extra relaxation into the bias-line bath
  johnson_convention johnson = johnson_convention::quantum;

  void validate() const;
};

// rates in 1/s
double dephasing_tl(double gamma5_diag_diff, double t, double z0);

struct flux_slopes {
  double d_eps = 0.0;   // d omega10 / d f_eps, rad/s
  double d_beta = 0.0;  // d omega10 / d f_beta, rad/s
};

flux_slopes omega10_slopes(const circuit_params& p, const flux_bias& b, const solver_config& cfg,
                           double step = 1e-4, const spectrum* warm = nullptr);
double dephasing_flux_1f(const flux_slopes& slopes, const noise_model& noise);

double johnson_current_noise(double omega, double t, double z, johnson_convention c);
double relaxation_bias_lines(std::complex<double> dh_eps_01, std::complex<double> dh_beta_01,
                             const noise_model& noise, double omega01);
double relaxation_flux_1f(std::complex<double> dh_eps_01, std::complex<double> dh_beta_01,
                          const noise_model& noise, double omega01);
double relaxation_quasiparticle(const std::array<std::complex<double>, 6>& sin_half_01, const noise_model& noise,
                                double omega01, const std::array<double, 6>& ej);

struct decoherence_budget {
  double omega01 = 0.0;
  double gamma1 = 0.0;  // radiative, zero temperature
  double gamma_phi_tl = 0.0;
  double gamma_phi_1f = 0.0;
  double gamma_phi = 0.0;
  double gamma10_bias = 0.0;
  double gamma10_1f = 0.0;
  double gamma10_qp = 0.0;
  double gamma10_residual = 0.0;
  double gamma10_nr = 0.0;
  double gamma10 = 0.0;  // thermal totals
  double gamma01 = 0.0;
  double t_eff = 0.0;
};

// the non-radiative channels share the bias-line temperature
decoherence_budget budget(const circuit_params& p, const spectrum& s, const noise_model& noise,
                          const line_params& tl, double t_tl, const solver_config& cfg);

}  // namespace tcq
