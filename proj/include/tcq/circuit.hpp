#pragma once

#include <array>

#include <Eigen/Dense>

namespace tcq {

struct flux_bias {
  double f_beta = 0.5;
  double f_eps = 0.5;
};

// capacitance per junction area calibrated so that Delta/2pi = 5.7 GHz at
// (f_beta, f_eps) = (0.41, f_sym) with the default charge truncation
inline constexpr double default_specific_capacitance = 68.358881789111786e-3;  // F/m^2

struct circuit_params {
  std::array<double, 6> ic{};        // A
  std::array<double, 6> c_branch{};  // F
  Eigen::Matrix4d c_extra = Eigen::Matrix4d::Zero();  // F, in (g1, g2, g4, g5)
  double l0 = 0.0;  // H/m
  double c0 = 0.0;  // F/m
  double z0 = 0.0;  // ohm
  // optional phi0^2 g5^2 / (2 l0 dx) term with dx = v / (omega_ref / 2pi)
  bool renormalization = false;
  double renormalization_omega = 0.0;

  void validate() const;
  double phase_velocity() const;
};

// design areas in um^2
std::array<double, 6> design_junction_areas();

circuit_params default_circuit(double specific_capacitance = default_specific_capacitance);

// per-coordinate matrix for the variables (g1, g2, g4, g5); g3 and g6 are
// eliminated by the two flux quantisation conditions
Eigen::Matrix4d coordinate_capacitance(const circuit_params& p);

// branch phase i = sum_j incidence(i, j) g_j + branch_offset(i)
const Eigen::Matrix<double, 6, 4>& incidence();
std::array<double, 6> branch_offsets(const flux_bias& b);

struct junction_term {
  std::array<int, 4> shift;  // coefficient of (g1, g2, g4, g5) in the cosine argument
  double phase;              // constant added to the argument
  double ej;                 // J
};

// U = -sum ej cos(shift . g + phase)
std::array<junction_term, 6> junction_terms(const circuit_params& p, const flux_bias& b);

// coefficient K of K * g5^2 (J), zero when renormalization is off
double renormalization_strength(const circuit_params& p);

}  // namespace tcq
