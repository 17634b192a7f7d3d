#pragma once

#include <array>
#include <complex>
#include <vector>

#include "tcq/circuit.hpp"
#include "tcq/least_squares.hpp"
#include "tcq/spectrum.hpp"

namespace tcq {

struct spectroscopy_sample {
  double f_beta = 0.0;
  double f_eps = 0.0;
  double omega10 = 0.0;      // rad/s
  double uncertainty = 0.0;  // rad/s, 0 means unweighted
};

struct two_level_fit {
  double delta = 0.0;  // rad/s
  double i_tls = 0.0;  // A
  double f_sym = 0.0;
  double delta_sigma = 0.0;
  double i_tls_sigma = 0.0;
  double f_sym_sigma = 0.0;
  double rms_residual = 0.0;  // rad/s
  ls_result fit;
};

// omega10 = sqrt(Delta^2 + (2 I Phi0 (f_eps - f_sym) / hbar)^2) at one f_beta
two_level_fit fit_two_level(const std::vector<spectroscopy_sample>& samples);
double two_level_omega(double delta, double i_tls, double f_sym, double f_eps);

ls_options circuit_fit_ls_defaults();

struct circuit_fit_options {
  solver_config solver = solver_config::uniform(4);
  ls_options ls = circuit_fit_ls_defaults();
  std::array<bool, 6> free{true, true, true, true, true, true};
};

struct circuit_fit {
  circuit_params params;
  std::array<double, 6> ic_sigma{};
  double rms_residual = 0.0;  // rad/s
  bool non_identifiable = false;
  ls_result fit;
};

// fits the critical currents with the capacitances held fixed; start supplies
// the initial currents and everything else
circuit_fit fit_circuit(const circuit_params& start, const std::vector<spectroscopy_sample>& samples,
                        const circuit_fit_options& opt = {});

struct transmission_sample {
  double power_dbm = 0.0;
  double omega_p = 0.0;  // rad/s
  std::complex<double> t;
  double uncertainty = 0.0;  // per quadrature, 0 means unweighted
};

struct transmission_params {
  double gamma1 = 0.0;      // rad/s
  double gamma10_nr = 0.0;  // rad/s
  double gamma_phi = 0.0;   // rad/s
  double temperature = 0.0;   // K, shared by the line and the non-radiative bath
  double attenuation_db = 0.0;
  double delta = 0.0;  // rad/s
};

std::complex<double> transmission_curve(const transmission_params& p, double power_dbm, double omega_p);

struct transmission_fit_options {
  bool amplitude_only = false;
  ls_options ls;
  double condition_threshold = 1e8;
};

struct transmission_fit {
  transmission_params params;
  transmission_params sigma;
  double t_eff = 0.0;
  double rms_residual = 0.0;
  bool degenerate = false;  // T and the non-radiative rate are not separately identified
  ls_result fit;
};

transmission_fit fit_transmission(const std::vector<transmission_sample>& samples,
                                  const transmission_fit_options& opt = {});
// same, starting from a supplied guess
transmission_fit fit_transmission(const std::vector<transmission_sample>& samples, const transmission_params& guess,
                                  const transmission_fit_options& opt = {});

}  // namespace tcq
