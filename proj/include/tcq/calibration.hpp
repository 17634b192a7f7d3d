#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tcq/circuit.hpp"
#include "tcq/spectrum.hpp"

namespace tcq {

struct scan2d {
  std::vector<double> i_beta;  // A, uniform and increasing
  std::vector<double> i_eps;   // A, uniform and increasing
  Eigen::MatrixXd values;      // |S21|, values(ib, ie)
  double probe_omega = 0.0;    // rad/s

  void validate() const;
  double step_beta() const;
  double step_eps() const;
};

// I - I0 = W (f - (0.5, 0.5)); column 0 is one f_beta quantum, column 1 one f_eps quantum
struct crosstalk_map {
  Eigen::Matrix2d w = Eigen::Matrix2d::Identity();  // A per flux quantum
  Eigen::Vector2d i0 = Eigen::Vector2d::Zero();     // A

  double det() const { return w.determinant(); }
};

flux_bias currents_to_fluxes(const crosstalk_map& map, double i_beta, double i_eps);
Eigen::Vector2d fluxes_to_currents(const crosstalk_map& map, const flux_bias& f);

enum class lattice_assignment { sensitivity, axis };

struct lattice_options {
  lattice_assignment assignment = lattice_assignment::sensitivity;
  double min_peak = 0.3;        // autocorrelation peak relative to zero lag
  double relative_peak = 0.75;  // relative to the strongest non-zero peak
  double blur = 1.5;            // Gaussian smoothing for the peak search, pixels
  double register_blur = 1.0;   // smoothing for the subpixel registration, pixels
};

struct lattice_result {
  Eigen::Matrix2d w;
  Eigen::Vector2d peak_strength;  // normalised autocorrelation at the two basis peaks
  int peaks_used = 0;             // peaks entering the least-squares refinement
  Eigen::Vector2d sensitivity;    // gradient energy along each column
};

lattice_result lattice_vectors(const scan2d& scan, const lattice_options& opt = {});

struct offset_options {
  double radius = 0.15;      // flux quanta around a candidate centre counted as its dip mass
  double ambiguity = 0.9;    // runner-up score ratio that flags an ambiguous centre
  double blur = 1.5;         // pixels
  double register_blur = 1.0;
};

struct offset_candidate {
  Eigen::Vector2d i0;
  double score = 0.0;
};

struct offset_result {
  Eigen::Vector2d i0;
  std::vector<offset_candidate> candidates;  // best first
  Eigen::Vector2d inversion_centre;          // as found, before the half-lattice choice
  bool ambiguous = false;
};

offset_result offsets(const scan2d& scan, const Eigen::Matrix2d& w, const offset_options& opt = {});

// omega10 (rad/s) as a function of the normalised fluxes
using omega10_model = std::function<double(const flux_bias&)>;

// two-level stand-in with the symmetries of the circuit; cheap enough for image synthesis
struct surrogate_params {
  double delta_min = 2.0 * 3.14159265358979323846 * 3.5e9;   // at f_beta = 1/2
  double delta_max = 2.0 * 3.14159265358979323846 * 12.0e9;  // at f_beta = 0
  double sym_swing = 0.125;  // amplitude of the f_eps symmetry line
  double i_p = 20e-9;        // A
};
omega10_model surrogate_model(const surrogate_params& p = {});

// periodic bicubic interpolation of the circuit spectrum on a points x points unit cell
omega10_model tabulated_model(const circuit_params& p, const solver_config& cfg, int points);

struct synthesis_options {
  double gamma1 = 2.0 * 3.14159265358979323846 * 1.6e9;
  double gamma_phi = 2.0 * 3.14159265358979323846 * 0.2e9;
  double cutoff = 50.0;  // linewidths beyond which |t| = 1
  int supersample = 3;
  double noise = 0.0;    // relative, multiplicative
  std::uint64_t seed = 0;
};

scan2d synthesize_scan(const omega10_model& model, const crosstalk_map& map, double probe_omega,
                       const std::vector<double>& i_beta, const std::vector<double>& i_eps,
                       const synthesis_options& opt = {});

std::vector<double> uniform_axis(double lo, double hi, int points);

}  // namespace tcq
