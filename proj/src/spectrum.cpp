#include "tcq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/hamiltonian.hpp"
#include "tcq/matrix_elements.hpp"

namespace tcq {

solver_config solver_config::uniform(int n) {
  solver_config c;
  c.charge_cutoff = {n, n, n, n};
  return c;
}

double spectrum::omega(int i, int j) const { return (energies[i] - energies[j]) / constants::hbar; }

namespace {

Eigen::Index subspace_size(const solver_config& cfg) {
  return cfg.eig.max_subspace > 0 ? cfg.eig.max_subspace : std::max(6 * cfg.levels, 24);
}

void check_budget(double bytes, const solver_config& cfg, const std::string& what) {
  if (bytes > cfg.memory_budget_bytes) {
    std::ostringstream os;
    os << what << " needs about " << bytes / 1e6 << " MB, above the budget of " << cfg.memory_budget_bytes / 1e6
       << " MB";
    throw capacity_error(os.str());
  }
}

// charge coefficients carried over between cutoffs, padding with zeros
cmat remap_charge(const cmat& src, const charge_basis& from, const charge_basis& to) {
  cmat out = cmat::Zero(to.size, src.cols());
  for (Eigen::Index i = 0; i < from.size; ++i) {
    const auto n = from.charges(i);
    if (to.contains(n)) out.row(to.index(n)) = src.row(i);
  }
  return out;
}

spectrum finish(const eigen_result& r, const basis_info& info, const flux_bias& b) {
  spectrum s;
  s.energies = r.values * constants::energy_unit;
  s.states = std::make_shared<const cmat>(r.vectors);
  s.residuals = r.residuals;
  s.basis = info;
  s.bias = b;
  s.iterations = r.iterations;
  return s;
}

}  // namespace

spectrum solve_spectrum(const circuit_params& p, const flux_bias& b, const solver_config& cfg, const spectrum* warm) {
  p.validate();
  if (cfg.levels < 1) throw config_error("number of levels must be positive");
  const double store = 2.0 * subspace_size(cfg) * 16.0;

  if (cfg.kind == backend::charge) {
    charge_basis basis(cfg.charge_cutoff);
    check_budget(charge_hamiltonian_bytes(basis, p.renormalization) + store * basis.size, cfg,
                 "charge-basis Hamiltonian");
    sparse_operator op(charge_hamiltonian(p, b, basis));
    cmat guess;
    if (warm && warm->states) {
      if (warm->basis.kind == backend::charge) {
        guess = warm->basis.cutoff == basis.cutoff ? *warm->states
                                                   : remap_charge(*warm->states, charge_basis(warm->basis.cutoff), basis);
      } else {
        guess.resize(basis.size, warm->states->cols());
        for (Eigen::Index c = 0; c < guess.cols(); ++c)
          guess.col(c) = grid_to_charge(basis, warm->states->col(c), warm->basis.grid_points);
      }
    }
    const auto r = lowest_eigenpairs(op, cfg.levels, cfg.eig, guess.size() ? &guess : nullptr);
    return finish(r, {backend::charge, basis.cutoff, 0, basis.size}, b);
  }

  const double g = cfg.grid_points;
  const double dim = g * g * g * g;
  check_budget(dim * (16.0 + 16.0 + 16.0) + store * dim, cfg, "phase-grid operator");
  grid_hamiltonian op(p, b, cfg.grid_points);
  cmat guess;
  spectrum seed;
  const spectrum* from = warm;
  if (!from || !from->states) {
    solver_config coarse = cfg;
    coarse.kind = backend::charge;
    const int n = std::min(7, (cfg.grid_points - 1) / 2);
    coarse.charge_cutoff = {n, n, n, n};
    seed = solve_spectrum(p, b, coarse);
    from = &seed;
  }
  if (from->basis.kind == backend::phase_grid && from->basis.grid_points == cfg.grid_points) {
    guess = *from->states;
  } else if (from->basis.kind == backend::charge) {
    charge_basis basis(from->basis.cutoff);
    guess.resize(op.dim(), from->states->cols());
    for (Eigen::Index c = 0; c < guess.cols(); ++c)
      guess.col(c) = charge_to_grid(basis, from->states->col(c), cfg.grid_points);
  }
  const auto r = lowest_eigenpairs(op, cfg.levels, cfg.eig, guess.size() ? &guess : nullptr);
  return finish(r, {backend::phase_grid, {}, cfg.grid_points, op.dim()}, b);
}

transition transition_frequency(const circuit_params& p, const flux_bias& b, const solver_config& cfg,
                                const spectrum* warm) {
  solver_config c = cfg;
  c.levels = std::max(cfg.levels, 2);
  const auto s = solve_spectrum(p, b, c, warm);
  transition t;
  const double gap = s.energies[1] - s.energies[0];
  t.omega10 = gap / constants::hbar;
  t.degenerate = gap <= 10.0 * c.eig.tolerance * std::abs(s.energies[0]);
  return t;
}

namespace {

double domega_dfeps(const circuit_params& p, const spectrum& s) {
  return (dh_dfeps_element(p, s, 1, 1).real() - dh_dfeps_element(p, s, 0, 0).real()) / constants::hbar;
}

// bracketing Brent search on omega10 at the configured truncation
double brent_minimum(const circuit_params& p, double f_beta, const solver_config& c, double a, double b, int bits,
                     spectrum& last, bool& have) {
  auto eval = [&](double fe) {
    last = solve_spectrum(p, {f_beta, fe}, c, have ? &last : nullptr);
    have = true;
    return last.omega(1, 0);
  };
  std::uintmax_t iters = 200;
  return boost::math::tools::brent_find_minima(eval, a, b, bits, iters).first;
}

}  // namespace

symmetry_result symmetry_point(const circuit_params& p, double f_beta, const solver_config& cfg, double lo,
                               double hi) {
  if (!(hi > lo)) throw bracket_error("symmetry-point bracket is empty");
  solver_config c = cfg;
  c.levels = std::max(cfg.levels, 2);

  // coarse stage at a cheap truncation locates the basin
  solver_config coarse = c;
  coarse.kind = backend::charge;
  for (auto& n : coarse.charge_cutoff) n = std::min(n, 4);
  if (c.kind == backend::charge && coarse.charge_cutoff == c.charge_cutoff) coarse = c;
  spectrum last;
  bool have = false;
  constexpr int samples = 9;
  std::array<double, samples> xs{}, ys{};
  for (int i = 0; i < samples; ++i) {
    xs[i] = lo + (hi - lo) * i / (samples - 1);
    last = solve_spectrum(p, {f_beta, xs[i]}, coarse, have ? &last : nullptr);
    have = true;
    ys[i] = last.omega(1, 0);
  }
  // strict comparison keeps the smaller f_eps on ties
  int best = 0;
  for (int i = 1; i < samples; ++i)
    if (ys[i] < ys[best]) best = i;
  if (best == 0 || best == samples - 1) throw bracket_error("omega10 has no interior minimum in the f_eps bracket");
  const double a = xs[best - 1], b = xs[best + 1];
  const double guess = brent_minimum(p, f_beta, coarse, a, b, 14, last, have);

  // refinement: secant on d omega10 / d f_eps from Hellmann-Feynman
  symmetry_result out;
  double x0 = guess;
  spectrum s0 = solve_spectrum(p, {f_beta, x0}, c, &last);
  double g0 = domega_dfeps(p, s0);
  double x1 = std::clamp(x0 + (g0 > 0 ? -1e-4 : 1e-4), a, b);
  spectrum s1 = solve_spectrum(p, {f_beta, x1}, c, &s0);
  double g1 = domega_dfeps(p, s1);
  bool ok = false;
  for (int it = 0; it < 30; ++it) {
    if (g1 == g0) break;
    const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
    if (!(x2 > a && x2 < b)) break;
    spectrum s2 = solve_spectrum(p, {f_beta, x2}, c, &s1);
    const double g2 = domega_dfeps(p, s2);
    x0 = x1;
    g0 = g1;
    s0 = std::move(s1);
    x1 = x2;
    g1 = g2;
    s1 = std::move(s2);
    if (std::abs(x1 - x0) < 1e-10) {
      ok = true;
      break;
    }
  }
  if (ok && s1.omega(1, 0) <= s0.omega(1, 0) * (1.0 + 1e-9)) {
    out.f_eps = x1;
    out.state = std::move(s1);
  } else {
    last = s1;
    out.f_eps = brent_minimum(p, f_beta, c, a, b, 30, last, have);
    out.state = solve_spectrum(p, {f_beta, out.f_eps}, c, &last);
  }
  out.delta = out.state.omega(1, 0);
  return out;
}

persistent_current_result persistent_current(const circuit_params& p, double f_beta, const solver_config& cfg,
                                             double window, int samples) {
  if (samples < 3) throw config_error("persistent-current fit needs at least three samples");
  const auto sym = symmetry_point(p, f_beta, cfg);
  Eigen::MatrixXd a(samples, 2);
  Eigen::VectorXd y(samples);
  const spectrum* warm = &sym.state;
  spectrum last;
  for (int i = 0; i < samples; ++i) {
    const double d = window * (2.0 * i / (samples - 1) - 1.0);
    last = solve_spectrum(p, {f_beta, sym.f_eps + d}, cfg, warm);
    warm = &last;
    const double w = last.omega(1, 0);
    a(i, 0) = 1.0;
    a(i, 1) = d * d;
    y[i] = w * w;
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  persistent_current_result r;
  r.f_sym = sym.f_eps;
  r.delta = std::sqrt(std::max(c[0], 0.0));
  r.i_tls = std::sqrt(std::max(c[1], 0.0)) * constants::hbar / (2.0 * constants::flux_quantum);
  r.fit_residual = std::sqrt(((a * c - y).array() / y.array()).square().mean());
  r.warning = r.fit_residual > 1e-2;
  return r;
}

std::vector<coupler_point> coupler_response(const circuit_params& p, const std::vector<double>& f_betas, double f_eps,
                                            const solver_config& cfg, double step) {
  std::vector<coupler_point> out;
  spectrum last;
  bool have = false;
  auto current = [&](double fb) {
    last = solve_spectrum(p, {fb, f_eps}, cfg, have ? &last : nullptr);
    have = true;
    return dh_dfbeta_element(p, last, 0, 0).real() / constants::flux_quantum;
  };
  for (double fb : f_betas) {
    coupler_point c;
    c.f_beta = fb;
    const double up = current(fb + step);
    const double dn = current(fb - step);
    c.i_g = current(fb);
    c.inv_l_beta = (up - dn) / (2.0 * step * constants::flux_quantum);
    out.push_back(c);
  }
  return out;
}

double calibrate_capacitance(circuit_params p, const flux_bias& b, double target_omega, const solver_config& cfg,
                             double lo, double hi) {
  const auto areas = design_junction_areas();
  spectrum last;
  bool have = false;
  auto f = [&](double sc) {
    for (int i = 0; i < 6; ++i) p.c_branch[i] = sc * areas[i] * 1e-12;
    last = solve_spectrum(p, b, cfg, have ? &last : nullptr);
    have = true;
    return last.omega(1, 0) / target_omega - 1.0;
  };
  const double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0) throw bracket_error("target frequency not bracketed by the capacitance range");
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(40), iters);
  return 0.5 * (r.first + r.second);
}

std::vector<convergence_row> convergence_sweep(const circuit_params& p, const flux_bias& b,
                                               const std::vector<std::array<int, 4>>& cutoffs, int levels,
                                               const solver_config& cfg) {
  std::vector<convergence_row> rows;
  solver_config c = cfg;
  c.kind = backend::charge;
  c.levels = levels;
  spectrum last;
  bool have = false;
  for (const auto& n : cutoffs) {
    c.charge_cutoff = n;
    last = solve_spectrum(p, b, c, have ? &last : nullptr);
    have = true;
    convergence_row r;
    r.cutoff = n;
    r.dim = last.basis.dim;
    r.energies = last.energies;
    if (!rows.empty()) {
      const auto& prev = rows.back().energies;
      for (int i = 1; i < levels; ++i) {
        const double now = r.energies[i] - r.energies[0];
        const double was = prev[i] - prev[0];
        r.max_rel_change = std::max(r.max_rel_change, std::abs(now - was) / std::abs(now));
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace tcq
