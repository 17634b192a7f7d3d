#include "tcq/circuit.hpp"

#include <cmath>
#include <sstream>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

void circuit_params::validate() const {
  for (int i = 0; i < 6; ++i) {
    if (!(ic[i] > 0.0) || !std::isfinite(ic[i])) {
      std::ostringstream os;
      os << "critical current " << i + 1 << " must be positive, got " << ic[i];
      throw config_error(os.str());
    }
    if (!(c_branch[i] > 0.0) || !std::isfinite(c_branch[i])) {
      std::ostringstream os;
      os << "branch capacitance " << i + 1 << " must be positive, got " << c_branch[i];
      throw config_error(os.str());
    }
  }
  if (!(l0 > 0.0) || !(c0 > 0.0) || !(z0 > 0.0))
    throw config_error("transmission line l0, c0, z0 must be positive");
  const double z = std::sqrt(l0 / c0);
  if (std::abs(z - z0) > 1e-9 * z0) {
    std::ostringstream os;
    os << "inconsistent line parameters: sqrt(l0/c0) = " << z << " ohm but z0 = " << z0;
    throw config_error(os.str());
  }
  if ((c_extra - c_extra.transpose()).cwiseAbs().maxCoeff() > 1e-9 * c_extra.cwiseAbs().maxCoeff())
    throw config_error("extra capacitance matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(coordinate_capacitance(*this));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw config_error("capacitance matrix is not positive definite");
  if (renormalization && !(renormalization_omega > 0.0))
    throw config_error("renormalization needs a positive reference frequency");
}

double circuit_params::phase_velocity() const { return 1.0 / std::sqrt(l0 * c0); }

std::array<double, 6> design_junction_areas() {
  constexpr double a0 = 0.0467;
  const double a1 = 1.69 * a0;
  const double a4 = 3.0 * a0;
  return {a1, 0.58 * a1, a1, a4, a4, 0.52 * a4};
}

circuit_params default_circuit(double specific_capacitance) {
  circuit_params p;
  p.ic = {0.236e-6, 0.131e-6, 0.236e-6, 0.411e-6, 0.584e-6, 0.185e-6};
  const auto areas = design_junction_areas();
  for (int i = 0; i < 6; ++i) p.c_branch[i] = specific_capacitance * areas[i] * 1e-12;
  p.z0 = 50.0;
  const double v = 1.19e8;
  p.l0 = p.z0 / v;
  p.c0 = 1.0 / (p.z0 * v);
  p.renormalization_omega = 2.0 * constants::pi * 5.7e9;
  return p;
}

const Eigen::Matrix<double, 6, 4>& incidence() {
  static const Eigen::Matrix<double, 6, 4> m = [] {
    Eigen::Matrix<double, 6, 4> a;
    a << 1, 0, 0, 0,
         0, 1, 0, 0,
        -1, -1, -1, 0,
         0, 0, 1, 0,
         0, 0, 0, 1,
         0, 0, -1, -1;
    return a;
  }();
  return m;
}

std::array<double, 6> branch_offsets(const flux_bias& b) {
  const double two_pi = 2.0 * constants::pi;
  return {0.0, 0.0, -two_pi * b.f_eps, 0.0, 0.0, two_pi * b.f_beta};
}

Eigen::Matrix4d coordinate_capacitance(const circuit_params& p) {
  Eigen::Matrix<double, 6, 1> c;
  for (int i = 0; i < 6; ++i) c[i] = p.c_branch[i];
  const auto& m = incidence();
  return m.transpose() * c.asDiagonal() * m + p.c_extra;
}

std::array<junction_term, 6> junction_terms(const circuit_params& p, const flux_bias& b) {
  const double two_pi = 2.0 * constants::pi;
  std::array<junction_term, 6> t{{
      {{1, 0, 0, 0}, 0.0, 0.0},
      {{0, 1, 0, 0}, 0.0, 0.0},
      {{1, 1, 1, 0}, two_pi * b.f_eps, 0.0},
      {{0, 0, 1, 0}, 0.0, 0.0},
      {{0, 0, 0, 1}, 0.0, 0.0},
      {{0, 0, 1, 1}, -two_pi * b.f_beta, 0.0},
  }};
  for (int i = 0; i < 6; ++i) t[i].ej = constants::phi0 * p.ic[i];
  return t;
}

double renormalization_strength(const circuit_params& p) {
  if (!p.renormalization) return 0.0;
  const double dx = p.phase_velocity() / (p.renormalization_omega / (2.0 * constants::pi));
  return constants::phi0 * constants::phi0 / (2.0 * p.l0 * dx);
}

}  // namespace tcq
