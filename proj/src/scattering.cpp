#include "tcq/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

double photon_flux(const drive_conditions& d) {
  if (!(d.omega_p > 0)) throw config_error("probe frequency must be positive");
  return std::pow(10.0, (d.power_dbm - d.attenuation_db) / 10.0 - 3.0) / (constants::hbar * d.omega_p);
}

thermal_result thermal_rates(const environment_rates& env, double omega01) {
  if (!(omega01 > 0)) throw config_error("transition frequency must be positive");
  if (env.gamma1 < 0 || env.gamma10_nr < 0 || env.gamma_phi < 0) throw config_error("rates must be non-negative");
  const double e = constants::hbar * omega01 / constants::k_b;
  thermal_result r;
  // n = 1/(e^x - 1); expm1 keeps the zero-temperature limit exact
  const double n_tl = env.t_tl > 0 ? 1.0 / std::expm1(e / env.t_tl) : 0.0;
  const double boltz_nr = env.t_nr > 0 ? std::exp(-e / env.t_nr) : 0.0;
  const double g10r = env.gamma1 * (1.0 + n_tl);
  const double g01r = env.gamma1 * n_tl;
  const double g01nr = env.gamma10_nr * boltz_nr;
  r.gamma10 = g10r + env.gamma10_nr;
  r.gamma01 = g01r + g01nr;
  r.b = r.gamma10 > 0 ? r.gamma01 / r.gamma10 : 0.0;
  r.t_eff = r.b > 0 ? constants::hbar * omega01 / (constants::k_b * std::log(1.0 / r.b)) : 0.0;
  return r;
}

coherence coherence_times(double gamma10, double gamma01, double gamma_phi) {
  if (gamma10 < 0 || gamma01 < 0 || gamma_phi < 0) throw config_error("rates must be non-negative");
  coherence c;
  const double g1 = gamma10 + gamma01;
  c.t1 = g1 > 0 ? 1.0 / g1 : infinite_time;
  const double g2 = gamma_phi + 0.5 * g1;
  c.t2 = g2 > 0 ? 1.0 / g2 : infinite_time;
  return c;
}

double on_resonance_reflection(double t2, double gamma1, double b) {
  const double r0 = 0.5 * (1.0 - b) / (1.0 + b) * t2 * gamma1;
  if (r0 > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "on-resonance reflection " << r0 << " exceeds 1; T2 and Gamma1 are inconsistent";
    throw consistency_error(os.str());
  }
  return std::min(r0, 1.0);
}

std::complex<double> reflection(double delta, double t1, double t2, double gamma1, double n_in, double r0) {
  const double dt = delta * t2;
  const double den = 1.0 + dt * dt + 2.0 * t1 * t2 * gamma1 * n_in;
  return -r0 * std::complex<double>(1.0, -dt) / den;
}

std::complex<double> transmission(double delta, double t1, double t2, double gamma1, double n_in, double r0) {
  const double dt = delta * t2;
  const double sat = 2.0 * t1 * t2 * gamma1 * n_in;
  const double den = 1.0 + dt * dt + sat;
  return std::complex<double>(1.0 - r0 + dt * dt + sat, r0 * dt) / den;
}

double rabi_frequency(double omega_p_amplitude, double gamma1, double omega10, double z0) {
  if (!(omega10 > 0) || !(z0 > 0)) throw config_error("rabi frequency needs positive omega10 and z0");
  return omega_p_amplitude * std::sqrt(gamma1 / (z0 * constants::hbar * omega10));
}

double photon_flux_from_amplitude(double omega_p_amplitude, double omega10, double z0) {
  return omega_p_amplitude * omega_p_amplitude / (2.0 * z0 * constants::hbar * omega10);
}

steady_state steady_state_for(const environment_rates& env, double omega10) {
  const auto th = thermal_rates(env, omega10);
  const auto co = coherence_times(th.gamma10, th.gamma01, env.gamma_phi);
  steady_state s;
  s.t1 = co.t1;
  s.t2 = co.t2;
  s.b = th.b;
  s.t_eff = th.t_eff;
  s.r0 = on_resonance_reflection(co.t2, env.gamma1, th.b);
  return s;
}

std::complex<double> transmission_model(const environment_rates& env, double omega10, const drive_conditions& d) {
  const auto s = steady_state_for(env, omega10);
  return transmission(d.omega_p - omega10, s.t1, s.t2, env.gamma1, photon_flux(d), s.r0);
}

std::vector<std::complex<double>> normalize_baseline(const std::vector<std::complex<double>>& s21,
                                                     const std::vector<double>& omega, double omega_res) {
  if (s21.size() != omega.size() || s21.empty()) throw data_error("baseline normalisation needs matching data");
  std::vector<std::size_t> idx(s21.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return std::abs(omega[a] - omega_res) > std::abs(omega[b] - omega_res);
  });
  const std::size_t n = std::max<std::size_t>(1, s21.size() / 10);
  std::vector<double> re, im;
  for (std::size_t i = 0; i < n; ++i) {
    re.push_back(s21[idx[i]].real());
    im.push_back(s21[idx[i]].imag());
  }
  auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };
  const std::complex<double> base(median(re), median(im));
  if (std::abs(base) == 0.0) throw data_error("baseline is zero");
  std::vector<std::complex<double>> out(s21.size());
  for (std::size_t i = 0; i < s21.size(); ++i) out[i] = s21[i] / base;
  return out;
}

}  // namespace tcq
