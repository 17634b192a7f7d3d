#pragma once

namespace tcq {

struct bloch_params {
  double omega10 = 0.0;  // rad/s
  double omega_p = 0.0;  // rad/s
  double omega_r = 0.0;  // Rabi frequency, rad/s
  double gamma10 = 0.0;
  double gamma01 = 0.0;
  double gamma_phi = 0.0;
};

// <sigma_x>(t) = sin_coeff sin(omega_p t) + cos_coeff cos(omega_p t)
struct sigma_x_response {
  double sin_coeff = 0.0;
  double cos_coeff = 0.0;
  double z = 0.0;  // steady-state <sigma_z>, ground state at -1
};

// closed-form rotating-wave steady state
sigma_x_response sigma_x_analytic(const bloch_params& p);

struct oracle_options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double settle = 1e-11;  // stop once a chunk moves the state by less than this
  int max_chunks = 400;
  bool full_drive = false;  // keep counter-rotating terms
};

struct oracle_result {
  sigma_x_response response;
  double elapsed = 0.0;  // simulated time, s
  int chunks = 0;
  double last_change = 0.0;
};

// integrates the Bloch equations from thermal equilibrium until the rotating-frame
// state stops moving; convergence_error when it does not settle
oracle_result sigma_x_oracle(const bloch_params& p, const oracle_options& opt = {});

}  // namespace tcq
