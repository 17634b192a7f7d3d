#pragma once

#include <complex>
#include <limits>
#include <vector>

namespace tcq {

struct drive_conditions {
  double power_dbm = 0.0;
  double attenuation_db = 0.0;
  double omega_p = 0.0;  // rad/s
};

struct environment_rates {
  double gamma1 = 0.0;      // radiative, zero temperature
  double gamma10_nr = 0.0;  // non-radiative relaxation
  double gamma_phi = 0.0;   // pure dephasing
  double t_tl = 0.0;        // K
  double t_nr = 0.0;        // K
};

struct thermal_result {
  double gamma10 = 0.0;
  double gamma01 = 0.0;
  double b = 0.0;
  double t_eff = 0.0;
};

struct coherence {
  double t1 = 0.0;
  double t2 = 0.0;
};

struct steady_state {
  double t1 = 0.0;
  double t2 = 0.0;
  double b = 0.0;
  double t_eff = 0.0;
  double r0 = 0.0;
};

inline constexpr double infinite_time = std::numeric_limits<double>::infinity();

// incoming photons per second at the qubit
double photon_flux(const drive_conditions& d);

thermal_result thermal_rates(const environment_rates& env, double omega01);

coherence coherence_times(double gamma10, double gamma01, double gamma_phi);

// on-resonance reflection magnitude; consistency_error when the inputs give r0 > 1
double on_resonance_reflection(double t2, double gamma1, double b);

// delta = omega_p - omega10
std::complex<double> reflection(double delta, double t1, double t2, double gamma1, double n_in, double r0);
std::complex<double> transmission(double delta, double t1, double t2, double gamma1, double n_in, double r0);

double rabi_frequency(double omega_p_amplitude, double gamma1, double omega10, double z0);
// N_in carried by a drive of amplitude Omega_p on a line of impedance z0
double photon_flux_from_amplitude(double omega_p_amplitude, double omega10, double z0);

steady_state steady_state_for(const environment_rates& env, double omega10);

// full model: thermal rates -> T1, T2, r0 -> t at the drive
std::complex<double> transmission_model(const environment_rates& env, double omega10, const drive_conditions& d);

// divides by the complex median of the 10% of points farthest from resonance
std::vector<std::complex<double>> normalize_baseline(const std::vector<std::complex<double>>& s21,
                                                     const std::vector<double>& omega, double omega_res);

}  // namespace tcq
