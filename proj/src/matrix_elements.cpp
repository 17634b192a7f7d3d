#include "tcq/matrix_elements.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/hamiltonian.hpp"

namespace tcq {

double wrap_phase(double x) {
  x = std::fmod(x + constants::pi, 2.0 * constants::pi);
  if (x < 0) x += 2.0 * constants::pi;
  return x - constants::pi;
}

namespace {

void require_states(const spectrum& s, int a, int b) {
  if (!s.states) throw unsupported_representation("spectrum carries no eigenvectors");
  const int n = static_cast<int>(s.states->cols());
  if (a < 0 || b < 0 || a >= n || b >= n) throw config_error("level index outside the computed spectrum");
}

// calls f(index, phases) for every point of a points^4 grid
template <class F>
void for_each_grid_point(int points, F&& f) {
  Eigen::Index idx = 0;
  std::array<double, 4> ph{};
  for (int a = 0; a < points; ++a) {
    ph[0] = grid_phase(a, points);
    for (int b = 0; b < points; ++b) {
      ph[1] = grid_phase(b, points);
      for (int c = 0; c < points; ++c) {
        ph[2] = grid_phase(c, points);
        for (int d = 0; d < points; ++d, ++idx) {
          ph[3] = grid_phase(d, points);
          f(idx, ph);
        }
      }
    }
  }
}

int sampling_points_for(const spectrum& s, int requested) {
  if (s.basis.kind == backend::phase_grid) return s.basis.grid_points;
  int need = 2 * *std::max_element(s.basis.cutoff.begin(), s.basis.cutoff.end()) + 2;
  int g = 4;
  while (g < need || g < requested) g *= 2;
  return g;
}

}  // namespace

cplx junction_exp_element(const circuit_params& p, const spectrum& s, int j, int a, int b, int sign) {
  require_states(s, a, b);
  const auto terms = junction_terms(p, s.bias);
  const auto& t = terms.at(j);
  const auto& psi = *s.states;
  const cplx phase = std::polar(1.0, sign * t.phase);
  cplx acc = 0.0;
  if (s.basis.kind == backend::charge) {
    charge_basis basis(s.basis.cutoff);
    for (Eigen::Index i = 0; i < basis.size; ++i) {
      auto n = basis.charges(i);
      for (int k = 0; k < 4; ++k) n[k] += sign * t.shift[k];
      if (basis.contains(n)) acc += std::conj(psi(basis.index(n), a)) * psi(i, b);
    }
    return phase * acc;
  }
  for_each_grid_point(s.basis.grid_points, [&](Eigen::Index i, const std::array<double, 4>& g) {
    double arg = 0.0;
    for (int k = 0; k < 4; ++k) arg += t.shift[k] * g[k];
    acc += std::conj(psi(i, a)) * std::polar(1.0, sign * arg) * psi(i, b);
  });
  return phase * acc;
}

cplx junction_cos_element(const circuit_params& p, const spectrum& s, int j, int a, int b) {
  return 0.5 * (junction_exp_element(p, s, j, a, b, +1) + junction_exp_element(p, s, j, a, b, -1));
}

cplx junction_sin_element(const circuit_params& p, const spectrum& s, int j, int a, int b) {
  return (junction_exp_element(p, s, j, a, b, +1) - junction_exp_element(p, s, j, a, b, -1)) / cplx(0.0, 2.0);
}

cplx charge_element(const circuit_params& p, const spectrum& s, int coord, int a, int b) {
  require_states(s, a, b);
  if (coord < 0 || coord > 3) throw config_error("coordinate index must be 0..3");
  const Eigen::Matrix4d kin = kinetic_matrix(p);
  const auto& psi = *s.states;
  cplx acc = 0.0;
  if (s.basis.kind == backend::charge) {
    charge_basis basis(s.basis.cutoff);
    for (Eigen::Index i = 0; i < basis.size; ++i) {
      const auto n = basis.charges(i);
      const double kn = kin(coord, 0) * n[0] + kin(coord, 1) * n[1] + kin(coord, 2) * n[2] + kin(coord, 3) * n[3];
      acc += std::conj(psi(i, a)) * kn * psi(i, b);
    }
    return acc * constants::energy_unit;
  }
  const int g = s.basis.grid_points;
  fft_plan plan({g, g, g, g});
  cvec fa = psi.col(a), fb = psi.col(b);
  plan.forward(fa.data());
  plan.forward(fb.data());
  Eigen::Index idx = 0;
  for (int i0 = 0; i0 < g; ++i0)
    for (int i1 = 0; i1 < g; ++i1)
      for (int i2 = 0; i2 < g; ++i2)
        for (int i3 = 0; i3 < g; ++i3, ++idx) {
          const Eigen::Vector4d n(fft_frequency(i0, g), fft_frequency(i1, g), fft_frequency(i2, g),
                                  fft_frequency(i3, g));
          acc += std::conj(fa[idx]) * kin.row(coord).dot(n) * fb[idx];
        }
  return acc * constants::energy_unit / static_cast<double>(fa.size());
}

cplx dh_dfeps_element(const circuit_params& p, const spectrum& s, int a, int b) {
  // U3 = -EJ3 cos(g1 + g2 + g4 + 2 pi f_eps)
  return 2.0 * constants::pi * constants::phi0 * p.ic[2] * junction_sin_element(p, s, 2, a, b);
}

cplx dh_dfbeta_element(const circuit_params& p, const spectrum& s, int a, int b) {
  // U6 = -EJ6 cos(g4 + g5 - 2 pi f_beta)
  return -2.0 * constants::pi * constants::phi0 * p.ic[5] * junction_sin_element(p, s, 5, a, b);
}

double energy_gradient_ic(const circuit_params& p, const spectrum& s, int level, int j) {
  return -constants::phi0 * junction_cos_element(p, s, j, level, level).real();
}

cvec phase_grid_state(const spectrum& s, int i, int points) {
  require_states(s, i, i);
  if (s.basis.kind == backend::phase_grid) {
    if (points != s.basis.grid_points) throw unsupported_representation("grid state requested on a different grid");
    return s.states->col(i);
  }
  return charge_to_grid(charge_basis(s.basis.cutoff), s.states->col(i), points);
}

matrix_element_set matrix_elements(const circuit_params& p, const spectrum& s, const matrix_element_options& opt) {
  require_states(s, 0, 1);
  matrix_element_set m;
  const double e10 = s.energies[1] - s.energies[0];
  if (opt.offdiag) {
    // [H, g5] = -i (hbar^2 / phi0^2) (C^-1 n)_5
    m.gamma5_01 = cplx(0.0, 2.0) * charge_element(p, s, 3, 0, 1) / e10;
  }
  if (opt.dh_df) {
    m.dh_dfeps_01 = dh_dfeps_element(p, s, 0, 1);
    m.dh_dfbeta_01 = dh_dfbeta_element(p, s, 0, 1);
  }
  if (!opt.diag && !opt.sin_half) return m;
  if (opt.sampling_points <= 0)
    throw unsupported_representation("diagonal and sin(g/2) elements need the phase-grid representation");

  const int g = sampling_points_for(s, opt.sampling_points);
  const cvec psi0 = phase_grid_state(s, 0, g);
  const cvec psi1 = phase_grid_state(s, 1, g);
  const auto offs = branch_offsets(s.bias);
  const auto& inc = incidence();
  cplx mean0 = 0.0, mean1 = 0.0;
  std::array<cplx, 6> sh{};
  for_each_grid_point(g, [&](Eigen::Index i, const std::array<double, 4>& ph) {
    const cplx a = psi0[i], b = psi1[i];
    if (opt.diag) {
      const cplx e5 = std::polar(1.0, ph[3]);
      mean0 += std::norm(a) * e5;
      mean1 += std::norm(b) * e5;
    }
    if (opt.sin_half) {
      const cplx ab = std::conj(a) * b;
      for (int k = 0; k < 6; ++k) {
        double br = offs[k];
        for (int c = 0; c < 4; ++c) br += inc(k, c) * ph[c];
        sh[k] += std::sin(0.5 * wrap_phase(br)) * ab;
      }
    }
  });
  if (opt.diag) m.gamma5_diag_diff = wrap_phase(std::arg(mean1) - std::arg(mean0));
  if (opt.sin_half) m.sin_half_01 = sh;
  return m;
}

}  // namespace tcq
