#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "tcq/circuit.hpp"
#include "tcq/eigensolver.hpp"

namespace tcq {

enum class backend { charge, phase_grid };

struct solver_config {
  backend kind = backend::charge;
  std::array<int, 4> charge_cutoff{7, 7, 7, 7};
  int grid_points = 32;
  int levels = 4;
  eigen_options eig;
  double memory_budget_bytes = 2.0e9;
  int sampling_points = 32;  // phase grid used for grid-only observables of charge states

  static solver_config uniform(int n);
};

struct basis_info {
  backend kind = backend::charge;
  std::array<int, 4> cutoff{};
  int grid_points = 0;
  Eigen::Index dim = 0;
};

struct spectrum {
  Eigen::VectorXd energies;              // J, ascending
  std::shared_ptr<const cmat> states;    // columns, unit norm
  Eigen::VectorXd residuals;             // relative
  basis_info basis;
  flux_bias bias;
  int iterations = 0;

  double omega(int i, int j) const;      // (E_i - E_j) / hbar
};

// warm may come from either backend; it only seeds the iteration
spectrum solve_spectrum(const circuit_params& p, const flux_bias& b, const solver_config& cfg,
                        const spectrum* warm = nullptr);

struct transition {
  double omega10 = 0.0;  // rad/s
  bool degenerate = false;
};

transition transition_frequency(const circuit_params& p, const flux_bias& b, const solver_config& cfg,
                                const spectrum* warm = nullptr);

struct symmetry_result {
  double f_eps = 0.0;
  double delta = 0.0;  // omega10 at the minimum, rad/s
  spectrum state;      // spectrum at the minimum
};

// minimum of omega10 over f_eps at fixed f_beta
symmetry_result symmetry_point(const circuit_params& p, double f_beta, const solver_config& cfg,
                               double lo = 0.3, double hi = 0.7);

struct persistent_current_result {
  double i_tls = 0.0;  // A
  double delta = 0.0;  // rad/s
  double f_sym = 0.0;
  double fit_residual = 0.0;  // rms of relative misfit of omega10^2
  bool warning = false;
};

// fits omega10^2 = Delta^2 + (2 I Phi0 / hbar)^2 (f_eps - f_sym)^2 on a small window
persistent_current_result persistent_current(const circuit_params& p, double f_beta, const solver_config& cfg,
                                             double window = 3e-3, int samples = 7);

struct coupler_point {
  double f_beta = 0.0;
  double i_g = 0.0;         // A, ground-state loop current
  double inv_l_beta = 0.0;  // 1/H, d i_g / d Phi_beta
};

std::vector<coupler_point> coupler_response(const circuit_params& p, const std::vector<double>& f_betas,
                                            double f_eps, const solver_config& cfg, double step = 1e-3);

// specific capacitance (F/m^2) with omega10 = target at (f_beta, f_eps)
double calibrate_capacitance(circuit_params p, const flux_bias& b, double target_omega, const solver_config& cfg,
                             double lo = 30e-3, double hi = 120e-3);

struct convergence_row {
  std::array<int, 4> cutoff{};
  Eigen::Index dim = 0;
  Eigen::VectorXd energies;  // J
  double max_rel_change = 0.0;  // of E_i - E_0 against the previous row
};

std::vector<convergence_row> convergence_sweep(const circuit_params& p, const flux_bias& b,
                                               const std::vector<std::array<int, 4>>& cutoffs, int levels,
                                               const solver_config& cfg);

}  // namespace tcq
