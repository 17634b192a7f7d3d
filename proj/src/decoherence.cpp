#include "tcq/decoherence.hpp"

#include <cmath>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/scattering.hpp"

namespace tcq {

void noise_model::validate() const {
  if (a_eps < 0 || a_beta < 0) throw config_error("flux noise amplitudes must be non-negative");
  if (!(f_ir > 0) || !(f_uv > f_ir)) throw config_error("need 0 < f_ir < f_uv");
  if (!(x_qp >= 0) || x_qp >= 1) throw config_error("x_qp must lie in [0, 1)");
  if (!(t_line > 0)) throw config_error("t_line must be positive");
  if (!(z_line > 0)) throw config_error("z_line must be positive");
  if (!(delta_al > 0)) throw config_error("delta_al must be positive");
  if (gamma10_residual < 0) throw config_error("gamma10_residual must be non-negative");
}

double dephasing_tl(double gamma5_diag_diff, double t, double z0) {
  if (!(t > 0)) throw config_error("temperature must be positive");
  const double phi0 = constants::phi0;
  return 2.0 * constants::k_b * t * phi0 * phi0 / (constants::hbar * constants::hbar * z0) * gamma5_diag_diff *
         gamma5_diag_diff;
}

flux_slopes omega10_slopes(const circuit_params& p, const flux_bias& b, const solver_config& cfg, double step,
                           const spectrum* warm) {
  auto w = [&](double fb, double fe) { return transition_frequency(p, {fb, fe}, cfg, warm).omega10; };
  flux_slopes s;
  s.d_eps = (w(b.f_beta, b.f_eps + step) - w(b.f_beta, b.f_eps - step)) / (2 * step);
  s.d_beta = (w(b.f_beta + step, b.f_eps) - w(b.f_beta - step, b.f_eps)) / (2 * step);
  return s;
}

double dephasing_flux_1f(const flux_slopes& slopes, const noise_model& noise) {
  const double l = std::log(noise.f_uv / noise.f_ir);
  return std::abs(slopes.d_eps) * std::sqrt(noise.a_eps * l) + std::abs(slopes.d_beta) * std::sqrt(noise.a_beta * l);
}

double johnson_current_noise(double omega, double t, double z, johnson_convention c) {
  if (c == johnson_convention::classical) return 2.0 * constants::k_b * t / z;
  const double x = constants::hbar * omega / (constants::k_b * t);
  return 2.0 * constants::hbar * omega / (z * -std::expm1(-x));
}

double relaxation_bias_lines(std::complex<double> dh_eps_01, std::complex<double> dh_beta_01,
                             const noise_model& noise, double omega01) {
  if (!(omega01 > 0)) throw config_error("transition frequency must be positive");
  const double si = johnson_current_noise(omega01, noise.t_line, noise.z_line, noise.johnson);
  const double k = si / std::pow(constants::hbar * constants::flux_quantum, 2);
  return k * (noise.m_eps * noise.m_eps * std::norm(dh_eps_01) + noise.m_beta * noise.m_beta * std::norm(dh_beta_01));
}

double relaxation_flux_1f(std::complex<double> dh_eps_01, std::complex<double> dh_beta_01,
                          const noise_model& noise, double omega01) {
  if (!(omega01 > 0)) throw config_error("transition frequency must be positive");
  // S_phi = A Phi0^2 2pi / omega; the Phi0^2 cancels
  const double k = 2.0 * constants::pi / (omega01 * constants::hbar * constants::hbar);
  return k * (noise.a_eps * std::norm(dh_eps_01) + noise.a_beta * std::norm(dh_beta_01));
}

double relaxation_quasiparticle(const std::array<std::complex<double>, 6>& sin_half_01, const noise_model& noise,
                                double omega01, const std::array<double, 6>& ej) {
  if (!(omega01 > 0)) throw config_error("transition frequency must be positive");
  const double root = std::sqrt(2.0 * noise.delta_al / (constants::hbar * omega01));
  double g = 0;
  for (int i = 0; i < 6; ++i)
    g += std::norm(sin_half_01[i]) * 8.0 * noise.x_qp * ej[i] / (constants::hbar * constants::pi) * root;
  return g;
}

decoherence_budget budget(const circuit_params& p, const spectrum& s, const noise_model& noise,
                          const line_params& tl, double t_tl, const solver_config& cfg) {
  noise.validate();
  tl.validate();
  const auto me = matrix_elements(p, s);
  decoherence_budget d;
  d.omega01 = s.omega(1, 0);
  d.gamma1 = radiative_rate(me.gamma5_01, d.omega01, tl);
  d.gamma_phi_tl = dephasing_tl(me.gamma5_diag_diff, t_tl, tl.z0);
  d.gamma_phi_1f = dephasing_flux_1f(omega10_slopes(p, s.bias, cfg, 1e-4, &s), noise);
  d.gamma_phi = d.gamma_phi_tl + d.gamma_phi_1f;
  d.gamma10_bias = relaxation_bias_lines(me.dh_dfeps_01, me.dh_dfbeta_01, noise, d.omega01);
  d.gamma10_1f = relaxation_flux_1f(me.dh_dfeps_01, me.dh_dfbeta_01, noise, d.omega01);
  std::array<double, 6> ej{};
  for (int i = 0; i < 6; ++i) ej[i] = p.ic[i] * constants::phi0;
  d.gamma10_qp = relaxation_quasiparticle(me.sin_half_01, noise, d.omega01, ej);
  d.gamma10_residual = noise.gamma10_residual;
  d.gamma10_nr = d.gamma10_bias + d.gamma10_1f + d.gamma10_qp + d.gamma10_residual;
  environment_rates env{d.gamma1, d.gamma10_nr, d.gamma_phi, t_tl, noise.t_line};
  const auto th = thermal_rates(env, d.omega01);
  d.gamma10 = th.gamma10;
  d.gamma01 = th.gamma01;
  d.t_eff = th.t_eff;
  return d;
}

}  // namespace tcq
