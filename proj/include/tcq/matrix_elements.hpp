#pragma once

#include <array>
#include <complex>

#include "tcq/spectrum.hpp"

namespace tcq {

using cplx = std::complex<double>;

// <a| exp(i sign (shift.g + phase)) |b> for junction term j (0-based)
cplx junction_exp_element(const circuit_params& p, const spectrum& s, int j, int a, int b, int sign = +1);
cplx junction_cos_element(const circuit_params& p, const spectrum& s, int j, int a, int b);
cplx junction_sin_element(const circuit_params& p, const spectrum& s, int j, int a, int b);

// <a| hbar^2/(2 phi0^2) (C^-1 n)_coord |b> in J, coord indexes (g1, g2, g4, g5)
cplx charge_element(const circuit_params& p, const spectrum& s, int coord, int a, int b);

// <a| dH/df |b> in J
cplx dh_dfeps_element(const circuit_params& p, const spectrum& s, int a, int b);
cplx dh_dfbeta_element(const circuit_params& p, const spectrum& s, int a, int b);

// d E_level / d Ic_j (J/A), Hellmann-Feynman
double energy_gradient_ic(const circuit_params& p, const spectrum& s, int level, int j);

// state i sampled on a points^4 phase grid, unit l2 norm over the samples
cvec phase_grid_state(const spectrum& s, int i, int points);

struct matrix_element_options {
  bool offdiag = true;
  bool diag = true;
  bool sin_half = true;
  bool dh_df = true;
  int sampling_points = 32;  // 0 disables phase-grid sampling
};

struct matrix_element_set {
  cplx gamma5_01{};
  double gamma5_diag_diff = 0.0;
  std::array<cplx, 6> sin_half_01{};
  cplx dh_dfeps_01{};
  cplx dh_dfbeta_01{};
};

// needs at least two levels in s
matrix_element_set matrix_elements(const circuit_params& p, const spectrum& s,
                                   const matrix_element_options& opt = {});

double wrap_phase(double x);  // into [-pi, pi)

}  // namespace tcq
