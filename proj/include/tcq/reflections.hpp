#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace tcq {

// reciprocal lossless two-port at the far end of the line
struct filter_model {
  std::complex<double> s11, s12, s21, s22;
  double z_q = 0.2;    // m, qubit to component
  double v = 1.19e8;   // m/s

  void validate() const;
  // real symmetric S with |s11| from the VSWR
  static filter_model from_vswr(double vswr, double z_q, double v);
};

double vswr_to_reflection(double vswr);

// reference plane moved by d on port 1
Eigen::Matrix2cd shifted_scattering(const filter_model& f, double omega, double d);

struct mode_info {
  std::array<double, 2> theta{};  // phase per parity in [0, 2pi)
  double d = 0.0;
  double v = 0.0;
  double residual = 0.0;  // largest |det(S - X)| at the roots
  int scan_points = 0;

  double omega(int parity, int n) const;  // v (theta_s + 2 pi n) / d
  std::vector<double> omegas(int parity, double lo, double hi) const;
};

// allowed frequencies of a line of length d closed by the component
mode_info mode_spectrum(const filter_model& f, double d, int scan_points = 4096);

std::array<std::complex<double>, 2> parity_reflection(const filter_model& f, const mode_info& m, int n = 0);

// both parities at the VSWR magnitude; the second parity is rotated by relative_phase
std::array<std::complex<double>, 2> vswr_parity_reflections(double vswr, double relative_phase = 0.0);

// rad/s
double relaxation_with_reflection(std::complex<double> gamma5_01, double omega, std::complex<double> r0,
                                  std::complex<double> r1, double z_q, double v, double z0);

}  // namespace tcq
