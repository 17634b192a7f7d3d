// One line per acceptance criterion. Tolerances are fixed here; a failing
// criterion makes the binary exit nonzero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tcq/bloch.hpp"
#include "tcq/calibration.hpp"
#include "tcq/constants.hpp"
#include "tcq/coupling.hpp"
#include "tcq/decoherence.hpp"
#include "tcq/estimation.hpp"
#include "tcq/matrix_elements.hpp"
#include "tcq/reflections.hpp"
#include "tcq/scattering.hpp"
#include "tcq/spectrum.hpp"

using namespace tcq;
using clk = std::chrono::steady_clock;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

double seconds_since(clk::time_point t) { return std::chrono::duration<double>(clk::now() - t).count(); }

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

struct sweep_point {
  double f_beta = 0;
  double f_sym = 0;
  double delta = 0;  // rad/s
  double g5 = 0;     // |<1|g5|0>|
  double gamma1 = 0;
  double alpha = 0;
  spectrum state;
};

// shared paper-parameter sweep at the default charge cutoff
std::map<double, sweep_point> symmetry_sweep(const circuit_params& p, const solver_config& cfg,
                                             const std::vector<double>& fbs) {
  std::map<double, sweep_point> out;
  const line_params tl{p.z0, p.l0, p.c0};
  for (double fb : fbs) {
    auto sp = symmetry_point(p, fb, cfg);
    matrix_element_options mo;
    mo.sin_half = mo.dh_df = false;
    const auto me = matrix_elements(p, sp.state, mo);
    const auto c = coupling(me.gamma5_01, me.gamma5_diag_diff, sp.delta, tl);
    out[fb] = {fb, sp.f_eps, sp.delta, std::abs(me.gamma5_01), c.gamma1, c.alpha, std::move(sp.state)};
  }
  return out;
}

void criterion_1(const circuit_params& p) {
  const auto t0 = clk::now();
  double worst = 0;
  for (double fb : {0.36, 0.40, 0.44}) {
    const auto sp = symmetry_point(p, fb, solver_config::uniform(6));
    solver_config cc;
    cc.charge_cutoff = {9, 9, 11, 11};
    const auto a = solve_spectrum(p, {fb, sp.f_eps}, cc, &sp.state);
    solver_config gc;
    gc.kind = backend::phase_grid;
    gc.grid_points = 32;
    const auto b = solve_spectrum(p, {fb, sp.f_eps}, gc, &a);
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(a.energies[i] - b.energies[i]) / std::abs(a.energies[i]));
  }
  const double t = seconds_since(t0);
  report(1, worst < 1e-6 && t < 120.0,
         fmt("charge (9,9,11,11) vs grid 32^4, lowest 4 levels at f_beta 0.36/0.40/0.44: worst rel %.2e (tol 1e-6), "
             "%.1f s (limit 120 s)",
             worst, t));
}

void criterion_2(const circuit_params& p) {
  auto cfg = solver_config::uniform(5);
  cfg.eig.tolerance = 1e-11;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_period = 0, worst_conj = 0;
  for (int k = 0; k < 20; ++k) {
    const double fb = u(rng), fe = u(rng);
    const auto s = solve_spectrum(p, {fb, fe}, cfg);
    const double w = s.omega(1, 0);
    const double wb = transition_frequency(p, {fb + 1.0, fe}, cfg, &s).omega10;
    const double we = transition_frequency(p, {fb, fe + 1.0}, cfg, &s).omega10;
    const double wc = transition_frequency(p, {1.0 - fb, 1.0 - fe}, cfg, &s).omega10;
    worst_period = std::max({worst_period, std::abs(wb - w) / w, std::abs(we - w) / w});
    worst_conj = std::max(worst_conj, std::abs(wc - w) / w);
  }
  report(2, worst_period < 1e-9 && worst_conj < 1e-9,
         fmt("20 random biases, charge N=5: periodicity worst rel %.2e, conjugation worst rel %.2e (tol 1e-9)",
             worst_period, worst_conj));
}

void criterion_3(const std::map<double, sweep_point>& sw) {
  // parabola through |g5|^2 at the smallest sample and its neighbours
  auto it = std::min_element(sw.begin(), sw.end(), [](auto& a, auto& b) { return a.second.g5 < b.second.g5; });
  double f_min = it->first;
  if (it != sw.begin() && std::next(it) != sw.end()) {
    const auto& a = std::prev(it)->second;
    const auto& b = it->second;
    const auto& c = std::next(it)->second;
    const double ya = a.g5 * a.g5, yb = b.g5 * b.g5, yc = c.g5 * c.g5;
    const double xa = a.f_beta, xb = b.f_beta, xc = c.f_beta;
    const double num = (xb - xa) * (xb - xa) * (yb - yc) - (xb - xc) * (xb - xc) * (yb - ya);
    const double den = (xb - xa) * (yb - yc) - (xb - xc) * (yb - ya);
    if (den != 0) f_min = xb - 0.5 * num / den;
  }
  report(3, std::abs(f_min - 0.365) <= 0.015,
         fmt("|g5_10| at symmetry points is smallest at f_beta = %.4f (sample %.3f, |g5| = %.3e); target 0.365 +- 0.015",
             f_min, it->first, it->second.g5));
}

void criterion_4(const std::map<double, sweep_point>& sw) {
  const double r = sw.at(0.44).gamma1 / sw.at(0.36).gamma1;
  report(4, r >= 100.0,
         fmt("Gamma1(0.44)/Gamma1(0.36) = %.1f (Gamma1/2pi = %.4g Hz / %.4g Hz); need >= 100", r,
             sw.at(0.44).gamma1 / two_pi, sw.at(0.36).gamma1 / two_pi));
}

void criterion_5(const std::map<double, sweep_point>& sw) {
  const solver_config cfg;
  const flux_bias b{0.41, 0.433};
  const double target = two_pi * 5.7e9;
  const double sc = calibrate_capacitance(default_circuit(), b, target, cfg);
  const double w = transition_frequency(default_circuit(sc), b, cfg).omega10;
  const double gap_err = std::abs(w / target - 1.0);
  // alpha with both rates angular; the paper's quoted value matches Gamma_Hz / (2 pi^2 Delta_Hz)
  const double alpha = sw.at(0.44).alpha;
  const double alpha_paper_norm = alpha / (2.0 * constants::pi);
  const double ref = 2.19e-2;
  auto within3 = [&](double a) { return a / ref <= 3.0 && ref / a <= 3.0; };
  const bool alpha_ok = within3(alpha) || within3(alpha_paper_norm);
  report(5, gap_err <= 0.02 && alpha_ok,
         fmt("calibrated C/area %.4f fF/um^2 gives omega10/2pi(0.41,0.433) = %.6g GHz (err %.2e, tol 2%%); "
             "alpha(0.44) = %.4g [Gamma/(pi Delta), angular] ratio %.2f, = %.4g [Gamma_Hz/(2 pi^2 Delta_Hz)] ratio %.2f "
             "vs 2.19e-2 (factor 3 under either reading)",
             sc * 1e3, w / two_pi / 1e9, gap_err, alpha, alpha / ref, alpha_paper_norm, alpha_paper_norm / ref));
}

void criterion_6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_ode = 0;
  for (int k = 0; k < 100; ++k) {
    bloch_params p;
    p.omega10 = two_pi * (4e9 + 4e9 * u(rng));
    p.gamma10 = 1e7 * (1 + 9 * u(rng));
    p.gamma01 = p.gamma10 * 0.9 * u(rng);
    p.gamma_phi = 2e7 * u(rng);
    p.omega_p = p.omega10 + (u(rng) - 0.5) * 6e7;
    p.omega_r = 4e7 * u(rng);
    const auto a = sigma_x_analytic(p);
    const auto o = sigma_x_oracle(p).response;
    worst_ode = std::max({worst_ode, std::abs(a.sin_coeff - o.sin_coeff), std::abs(a.cos_coeff - o.cos_coeff)});
  }
  double worst_id = 0;
  for (int k = 0; k < 1000; ++k) {
    const double g1 = 1e8 * (0.1 + u(rng)), t1 = 1.0 / (g1 * (1 + u(rng)));
    const double t2 = 1.0 / (0.5 / t1 + 1e8 * u(rng));
    const double b = u(rng);
    const double r0 = 0.5 * (1 - b) / (1 + b) * t2 * g1;
    const double d = (u(rng) - 0.5) * 1e9, n = 1e7 * u(rng);
    worst_id = std::max(worst_id, std::abs(transmission(d, t1, t2, g1, n, r0) - 1.0 - reflection(d, t1, t2, g1, n, r0)));
  }
  const double g1 = 2e8;
  const double ext = std::abs(transmission(0.0, 1.0 / g1, 2.0 / g1, g1, 1e-6, on_resonance_reflection(2.0 / g1, g1, 0.0)));
  report(6, worst_ode < 1e-6 && worst_id < 1e-12 && ext < 1e-9,
         fmt("analytic vs ODE <sigma_x> over 100 tuples: worst abs %.2e (tol 1e-6); |t - 1 - r| worst %.2e (tol 1e-12); "
             "|t| at r0 = 1, N_in -> 0: %.2e (tol 1e-9)",
             worst_ode, worst_id, ext));
}

void criterion_7() {
  const auto truth = default_circuit();
  circuit_fit_options opt;
  opt.solver = solver_config::uniform(3);
  opt.solver.levels = 2;
  opt.solver.eig.force_iterative = true;
  std::vector<spectroscopy_sample> data;
  for (double fb : {0.36, 0.40, 0.44})
    for (double fe : {0.41, 0.425, 0.435, 0.45})
      data.push_back({fb, fe, transition_frequency(truth, {fb, fe}, opt.solver).omega10, 0.0});
  double worst_ic = 0;
  const auto t0 = clk::now();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    auto start = truth;
    for (auto& i : start.ic) i *= 1 + u(rng);
    const auto f = fit_circuit(start, data, opt);
    for (int j = 0; j < 6; ++j) worst_ic = std::max(worst_ic, std::abs(f.params.ic[j] / truth.ic[j] - 1));
  }
  const double t_circuit = seconds_since(t0);

  const transmission_params tp{two_pi * 244e6, two_pi * 10e6, two_pi * 40e6, 0.05, 82.0, two_pi * 5.7e9};
  double worst_g1 = 0;
  int degenerate = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<transmission_sample> s;
    for (double pw = -48; pw <= -24; pw += 6)
      for (int k = 0; k <= 100; ++k) {
        const double w = tp.delta + two_pi * 1e9 * (k - 50) / 50.0;
        s.push_back({pw, w, transmission_curve(tp, pw, w) + 0.01 * std::complex<double>(n(rng), n(rng)), 0.0});
      }
    const auto f = fit_transmission(s);
    worst_g1 = std::max(worst_g1, std::abs(f.params.gamma1 / tp.gamma1 - 1));
    degenerate += f.degenerate;
  }
  report(7, worst_ic <= 0.01 && worst_g1 <= 0.05,
         fmt("circuit fit (charge N=3, 12 samples, +-10%% starts, 20 seeds, %.0f s): worst Ic error %.2e (tol 1e-2); "
             "transmission fit (-48..-24 dBm, 1%% noise, 20 seeds): worst Gamma1 error %.2e (tol 5e-2), "
             "T/Gamma_nr degeneracy flagged %d/20",
             t_circuit, worst_ic, worst_g1, degenerate));
}

void criterion_8() {
  crosstalk_map truth;
  truth.w << 1.0e-3, 0.15e-3, 0.25e-3, 1.2e-3;
  truth.i0 << 0.3e-3, -0.2e-3;
  const auto ax = uniform_axis(-1.5e-3, 1.5e-3, 128);
  const auto model = surrogate_model();
  double worst_w = 0, worst_o = 0;
  int ambiguous = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    synthesis_options so;
    so.noise = 0.05;
    so.seed = seed;
    const auto scan = synthesize_scan(model, truth, two_pi * 5e9, ax, ax, so);
    const auto lr = lattice_vectors(scan);
    for (int c = 0; c < 2; ++c)
      worst_w = std::max(worst_w, (lr.w.col(c) - truth.w.col(c)).norm() / truth.w.col(c).norm());
    const auto off = offsets(scan, lr.w);
    Eigen::Vector2d d = truth.w.inverse() * (off.i0 - truth.i0);
    d -= d.array().round().matrix();
    worst_o = std::max(worst_o, d.cwiseAbs().maxCoeff());
    ambiguous += off.ambiguous;
  }
  report(8, worst_w <= 0.01 && worst_o <= 0.005,
         fmt("128x128 scans, 5%% noise, 20 seeds: worst crosstalk column error %.2e (tol 1e-2), worst offset %.2e "
             "periods (tol 5e-3), ambiguous offsets %d/20",
             worst_w, worst_o, ambiguous));
}

void criterion_9(const circuit_params& p, const std::map<double, sweep_point>& sw) {
  const solver_config cfg;
  const noise_model noise;
  const line_params tl{p.z0, p.l0, p.c0};
  double min_ratio = 1e300, bias_lo = 1e300, bias_hi = 0, qp_hi = 0;
  for (double fb : {0.36, 0.38, 0.40, 0.42, 0.44}) {
    const auto b = budget(p, sw.at(fb).state, noise, tl, 0.05, cfg);
    min_ratio = std::min(min_ratio, b.gamma_phi_tl / b.gamma_phi_1f);
    bias_lo = std::min(bias_lo, b.gamma10_bias);
    bias_hi = std::max(bias_hi, b.gamma10_bias);
    qp_hi = std::max(qp_hi, b.gamma10_qp);
  }
  // "~2pi x 100 kHz scale": within one decade either side
  const double scale = two_pi * 100e3;
  const bool bias_ok = bias_lo >= scale / 10 && bias_hi <= scale * 10;
  const bool qp_ok = qp_hi * 5 <= two_pi * 10e6;
  report(9, min_ratio >= 10 && bias_ok && qp_ok,
         fmt("f_beta 0.36..0.44, T_line %.2f K: min Gamma_phi_TL/Gamma_phi_1f = %.1f (need >= 10); bias-line Gamma10/2pi "
             "%.3g..%.3g Hz (need 1e4..1e6 Hz) %s; max quasiparticle Gamma10/2pi %.3g Hz (need <= 2e6 Hz)",
             noise.t_line, min_ratio, bias_lo / two_pi, bias_hi / two_pi, bias_ok ? "ok" : "out of range", qp_hi / two_pi));
}

void criterion_10(const circuit_params& p, const std::map<double, sweep_point>& sw) {
  const double v = p.phase_velocity(), zq = 0.2;
  const line_params tl{p.z0, p.l0, p.c0};
  double worst_unity = 0;
  for (const auto& [fb, pt] : sw) {
    const double base = pt.gamma1;
    const double g = relaxation_with_reflection(pt.g5, pt.delta, 0.0, 0.0, zq, v, p.z0);
    worst_unity = std::max(worst_unity, std::abs(g / base - 1));
    const auto r1 = vswr_parity_reflections(1.0);
    worst_unity = std::max(worst_unity, std::abs(relaxation_with_reflection(pt.g5, pt.delta, r1[0], r1[1], zq, v, p.z0) / base - 1));
  }
  // envelope and period of the standing-wave factor Gamma / Gamma_B
  const std::complex<double> g5 = sw.begin()->second.g5;
  const auto r4 = vswr_parity_reflections(4.0);
  const double period = constants::pi * v / zq, w0 = two_pi * 4e9;
  double lo = 1e300, hi = 0, worst_period = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double w = w0 + period * k / n;
    const double f = relaxation_with_reflection(g5, w, r4[0], r4[1], zq, v, p.z0) / radiative_rate(g5, w, tl);
    const double f2 =
        relaxation_with_reflection(g5, w + 3 * period, r4[0], r4[1], zq, v, p.z0) / radiative_rate(g5, w + 3 * period, tl);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    worst_period = std::max(worst_period, std::abs(f2 - f));
  }
  const double r = vswr_to_reflection(4.0);
  const double lo_exact = (1 - r) * (1 - r) / (1 + r * r), hi_exact = (1 + r) * (1 + r) / (1 + r * r);
  const bool ok = worst_unity < 1e-12 && std::abs(lo / lo_exact - 1) < 0.01 && std::abs(hi / hi_exact - 1) < 0.01 &&
                  worst_period < 1e-9;
  report(10, ok,
         fmt("VSWR 1 vs radiative rate worst rel %.2e (tol 1e-12); VSWR 4 envelope [%.4f, %.4f] vs [%.4f, %.4f] (tol 1%%); "
             "Gamma/Gamma_B shift by 3 pi v/z_q worst %.2e (tol 1e-9), z_q = 0.2 m",
             worst_unity, lo, hi, lo_exact, hi_exact, worst_period));
}

}  // namespace

int main() {
  const auto t0 = clk::now();
  const auto p = default_circuit();
  const std::vector<double> fbs{0.35, 0.355, 0.36, 0.365, 0.37, 0.375, 0.38, 0.40, 0.41, 0.42, 0.44};
  std::printf("shared sweep: %zu symmetry points at charge N=%d\n", fbs.size(), solver_config{}.charge_cutoff[0]);
  std::fflush(stdout);
  const auto sw = symmetry_sweep(p, solver_config{}, fbs);
  std::printf("sweep done in %.0f s\n", seconds_since(t0));

  auto guarded = [](int n, auto&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(n, false, std::string("threw: ") + e.what());
    }
  };
  guarded(1, [&] { criterion_1(p); });
  guarded(2, [&] { criterion_2(p); });
  guarded(3, [&] { criterion_3(sw); });
  guarded(4, [&] { criterion_4(sw); });
  guarded(5, [&] { criterion_5(sw); });
  guarded(6, [&] { criterion_6(); });
  guarded(7, [&] { criterion_7(); });
  guarded(8, [&] { criterion_8(); });
  guarded(9, [&] { criterion_9(p, sw); });
  guarded(10, [&] { criterion_10(p, sw); });
  std::printf("%d of 10 criteria failed, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
