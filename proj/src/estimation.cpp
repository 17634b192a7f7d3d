#include "tcq/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/matrix_elements.hpp"
#include "tcq/scattering.hpp"

namespace tcq {

namespace {

double weight(double uncertainty) { return uncertainty > 0 ? 1.0 / uncertainty : 1.0; }

double epsilon_scale(double i_tls) { return 2.0 * i_tls * constants::flux_quantum / constants::hbar; }

}  // namespace

double two_level_omega(double delta, double i_tls, double f_sym, double f_eps) {
  const double e = epsilon_scale(i_tls) * (f_eps - f_sym);
  return std::sqrt(delta * delta + e * e);
}

two_level_fit fit_two_level(const std::vector<spectroscopy_sample>& samples) {
  if (samples.size() < 5) throw data_error("two-level fit needs at least five samples");
  for (const auto& s : samples) {
    if (!(s.omega10 > 0)) throw data_error("measured transition frequencies must be positive");
    if (s.f_beta != samples.front().f_beta) throw data_error("two-level fit needs a single f_beta");
  }
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.f_eps, a.omega10, a.uncertainty) < std::tie(b.f_eps, b.omega10, b.uncertainty);
  });
  const auto lowest = std::min_element(sorted.begin(), sorted.end(),
                                       [](const auto& a, const auto& b) { return a.omega10 < b.omega10; });
  if (lowest->f_eps == sorted.front().f_eps || lowest->f_eps == sorted.back().f_eps)
    throw bracket_error("samples do not straddle the minimum of the transition frequency");

  // start from the parabola through omega^2, centred on the data to keep the normal equations sane
  const auto n = static_cast<Eigen::Index>(sorted.size());
  const double fc = lowest->f_eps;
  const double wscale = lowest->omega10;
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = sorted[i].f_eps - fc;
    const double w = sorted[i].omega10 / wscale;
    a.row(i) << d * d, d, 1.0;
    y[i] = w * w;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  double f0 = fc, d0 = wscale, i0 = 0.0;
  if (c[0] > 0) {
    f0 = fc - c[1] / (2.0 * c[0]);
    const double d2 = c[2] - c[1] * c[1] / (4.0 * c[0]);
    d0 = d2 > 0 ? std::sqrt(d2) * wscale : wscale;
    i0 = std::sqrt(c[0]) * wscale / epsilon_scale(1.0);
  }
  if (!(i0 > 0)) {
    const double span = sorted.back().f_eps - sorted.front().f_eps;
    i0 = std::max(sorted.front().omega10, sorted.back().omega10) / (epsilon_scale(1.0) * 0.5 * span);
  }
  const double fspan = sorted.back().f_eps - sorted.front().f_eps;

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = two_level_omega(d0 * std::exp(x[0]), i0 * std::exp(x[1]), f0 + fspan * x[2], sorted[i].f_eps);
      r[i] = (m - sorted[i].omega10) * weight(sorted[i].uncertainty) /
             (sorted[i].uncertainty > 0 ? 1.0 : wscale);
    }
    return r;
  };
  ls_options lo;
  lo.scale_covariance = std::none_of(sorted.begin(), sorted.end(), [](const auto& s) { return s.uncertainty > 0; });
  auto fit = least_squares(residual_fn(residual), Eigen::Vector3d::Zero(), {}, lo);

  two_level_fit out;
  out.delta = d0 * std::exp(fit.x[0]);
  out.i_tls = i0 * std::exp(fit.x[1]);
  out.f_sym = f0 + fspan * fit.x[2];
  out.delta_sigma = out.delta * fit.sigma[0];
  out.i_tls_sigma = out.i_tls * fit.sigma[1];
  out.f_sym_sigma = fspan * fit.sigma[2];
  double ss = 0;
  for (const auto& s : sorted) {
    const double d = two_level_omega(out.delta, out.i_tls, out.f_sym, s.f_eps) - s.omega10;
    ss += d * d;
  }
  out.rms_residual = std::sqrt(ss / static_cast<double>(n));
  out.fit = std::move(fit);
  return out;
}

ls_options circuit_fit_ls_defaults() {
  ls_options o;
  // a damped first step keeps the iterate out of the far side of the valley
  o.initial_damping = 1.0;
  o.step_tol = 1e-10;
  return o;
}

circuit_fit fit_circuit(const circuit_params& start, const std::vector<spectroscopy_sample>& samples,
                        const circuit_fit_options& opt) {
  start.validate();
  std::set<double> betas;
  for (const auto& s : samples) {
    if (!(s.omega10 > 0)) throw data_error("measured transition frequencies must be positive");
    betas.insert(s.f_beta);
  }
  if (betas.size() < 3) throw data_error("circuit fit needs samples at three or more f_beta values");

  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.f_beta, a.f_eps, a.omega10, a.uncertainty) < std::tie(b.f_beta, b.f_eps, b.omega10, b.uncertainty);
  });
  std::vector<int> free;
  for (int j = 0; j < 6; ++j)
    if (opt.free[j]) free.push_back(j);
  if (free.empty()) throw config_error("no free critical currents");

  const auto n = static_cast<Eigen::Index>(sorted.size());
  const auto nf = static_cast<Eigen::Index>(free.size());
  const bool weighted = std::any_of(sorted.begin(), sorted.end(), [](const auto& s) { return s.uncertainty > 0; });
  // unweighted residuals are expressed in units of 2pi GHz
  const double unit = 2.0 * constants::pi * 1e9;
  auto scale = [&](const spectroscopy_sample& s) { return weighted ? weight(s.uncertainty) : 1.0 / unit; };

  solver_config cfg = opt.solver;
  cfg.levels = std::max(2, cfg.levels);
  std::vector<std::optional<spectrum>> warm(sorted.size());
  Eigen::VectorXd last_x;
  std::vector<spectrum> last;

  auto params_at = [&](const Eigen::VectorXd& x) {
    circuit_params p = start;
    for (Eigen::Index k = 0; k < nf; ++k) p.ic[free[k]] = start.ic[free[k]] * x[k];
    return p;
  };

  auto model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const circuit_params p = params_at(x);
    if (last_x.size() != x.size() || last_x != x) {
      std::vector<spectrum> trial;
      try {
        for (std::size_t i = 0; i < sorted.size(); ++i)
          trial.push_back(solve_spectrum(p, {sorted[i].f_beta, sorted[i].f_eps}, cfg, warm[i] ? &*warm[i] : nullptr));
      } catch (const convergence_error&) {
        // a trial point the solver cannot handle is rejected by the optimiser
        if (jac) throw;
        r = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
        return;
      }
      for (std::size_t i = 0; i < sorted.size(); ++i) warm[i] = trial[i];
      last = std::move(trial);
      last_x = x;
    }
    r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = (last[i].omega(1, 0) - sorted[i].omega10) * scale(sorted[i]);
    if (jac) {
      jac->resize(n, nf);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < nf; ++k) {
          const int j = free[k];
          const double d = energy_gradient_ic(p, last[i], 1, j) - energy_gradient_ic(p, last[i], 0, j);
          (*jac)(i, k) = start.ic[j] * d / constants::hbar * scale(sorted[i]);
        }
    }
  };

  Eigen::VectorXd x0(nf);
  x0.setOnes();
  ls_options lo = opt.ls;
  lo.scale_covariance = !weighted;
  ls_bounds bounds;
  bounds.lower = Eigen::VectorXd::Constant(nf, 0.25);
  bounds.upper = Eigen::VectorXd::Constant(nf, 4.0);
  auto fit = least_squares(ls_model(model), x0, bounds, lo);

  circuit_fit out;
  out.params = params_at(fit.x);
  for (Eigen::Index k = 0; k < nf; ++k) out.ic_sigma[free[k]] = start.ic[free[k]] * fit.sigma[k];
  out.rms_residual = fit.residual_norm / std::sqrt(static_cast<double>(n)) * (weighted ? 1.0 : unit);
  out.non_identifiable = fit.ill_conditioned;
  out.fit = std::move(fit);
  return out;
}

std::complex<double> transmission_curve(const transmission_params& p, double power_dbm, double omega_p) {
  environment_rates env;
  env.gamma1 = p.gamma1;
  env.gamma10_nr = p.gamma10_nr;
  env.gamma_phi = p.gamma_phi;
  env.t_tl = p.temperature;
  env.t_nr = p.temperature;
  return transmission_model(env, p.delta, {power_dbm, p.attenuation_db, omega_p});
}

namespace {

struct transmission_problem {
  std::vector<transmission_sample> data;
  double mean_power = 0.0;
  double omega_ref = 0.0;
  double omega_span = 1.0;
  bool amplitude_only = false;

  transmission_params decode(const Eigen::VectorXd& x) const {
    transmission_params p;
    p.gamma1 = std::exp(x[0]);
    p.gamma10_nr = std::exp(x[1]);
    p.gamma_phi = std::exp(x[2]);
    p.temperature = std::exp(x[3]);
    p.attenuation_db = mean_power + x[4];
    p.delta = omega_ref + omega_span * x[5];
    return p;
  }

  Eigen::VectorXd encode(const transmission_params& p) const {
    Eigen::VectorXd x(6);
    x << std::log(p.gamma1), std::log(p.gamma10_nr), std::log(p.gamma_phi), std::log(p.temperature),
        p.attenuation_db - mean_power, (p.delta - omega_ref) / omega_span;
    return x;
  }

  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const {
    const auto p = decode(x);
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd r(amplitude_only ? n : 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = data[i];
      const double w = weight(s.uncertainty);
      std::complex<double> m;
      try {
        m = transmission_curve(p, s.power_dbm, s.omega_p);
      } catch (const consistency_error&) {
        m = {std::numeric_limits<double>::quiet_NaN(), 0.0};
      }
      if (amplitude_only) {
        r[i] = (std::abs(m) - std::abs(s.t)) * w;
      } else {
        r[2 * i] = (m.real() - s.t.real()) * w;
        r[2 * i + 1] = (m.imag() - s.t.imag()) * w;
      }
    }
    return r;
  }
};

transmission_problem make_problem(const std::vector<transmission_sample>& samples, bool amplitude_only) {
  std::set<double> powers;
  for (const auto& s : samples) {
    if (!(s.omega_p > 0)) throw data_error("probe frequencies must be positive");
    if (!std::isfinite(s.t.real()) || !std::isfinite(s.t.imag())) throw data_error("transmission data not finite");
    powers.insert(s.power_dbm);
  }
  if (powers.size() < 3) throw data_error("transmission fit needs at least three power levels");
  transmission_problem prob;
  prob.amplitude_only = amplitude_only;
  prob.data = samples;
  std::sort(prob.data.begin(), prob.data.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.power_dbm, a.omega_p, a.t.real(), a.t.imag(), a.uncertainty) <
           std::make_tuple(b.power_dbm, b.omega_p, b.t.real(), b.t.imag(), b.uncertainty);
  });
  double sp = 0.0, lo = prob.data.front().omega_p, hi = lo;
  for (const auto& s : prob.data) {
    sp += s.power_dbm;
    lo = std::min(lo, s.omega_p);
    hi = std::max(hi, s.omega_p);
  }
  prob.mean_power = sp / static_cast<double>(prob.data.size());
  prob.omega_ref = 0.5 * (lo + hi);
  prob.omega_span = hi > lo ? hi - lo : prob.omega_ref * 1e-3;
  return prob;
}

transmission_params initial_guess(const transmission_problem& prob) {
  const double p_min = prob.data.front().power_dbm;
  std::vector<const transmission_sample*> low;
  for (const auto& s : prob.data)
    if (s.power_dbm == p_min) low.push_back(&s);
  const auto dip = *std::min_element(low.begin(), low.end(),
                                     [](auto a, auto b) { return std::abs(a->t) < std::abs(b->t); });
  const double r0 = std::clamp(std::abs(1.0 - dip->t), 0.05, 0.98);
  double w_lo = dip->omega_p, w_hi = dip->omega_p, spacing = prob.omega_span;
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (i > 0 && low[i]->omega_p > low[i - 1]->omega_p) spacing = std::min(spacing, low[i]->omega_p - low[i - 1]->omega_p);
    if (std::abs(1.0 - low[i]->t) >= r0 / std::sqrt(2.0)) {
      w_lo = std::min(w_lo, low[i]->omega_p);
      w_hi = std::max(w_hi, low[i]->omega_p);
    }
  }
  const double t2 = 2.0 / std::max(w_hi - w_lo, spacing);
  transmission_params g;
  g.delta = dip->omega_p;
  g.gamma1 = 2.0 * r0 / t2;
  g.gamma10_nr = 0.05 * g.gamma1;
  g.gamma_phi = std::max((1.0 - r0) / t2, 0.02 / t2);
  g.temperature = 0.05;
  // attenuation where the mean power half-saturates, refined by a coarse scan
  const double t1 = 1.0 / g.gamma1;
  const double n_half = 1.0 / (2.0 * t1 * t2 * g.gamma1);
  const double a0 = prob.mean_power - 10.0 * std::log10(n_half * constants::hbar * g.delta * 1e3);
  double best = std::numeric_limits<double>::infinity();
  double a_best = a0;
  for (int k = -30; k <= 30; ++k) {
    g.attenuation_db = a0 + 2.0 * k;
    const double c = prob.residuals(prob.encode(g)).squaredNorm();
    if (c < best) {
      best = c;
      a_best = g.attenuation_db;
    }
  }
  g.attenuation_db = a_best;
  return g;
}

}  // namespace

transmission_fit fit_transmission(const std::vector<transmission_sample>& samples, const transmission_fit_options& opt) {
  const auto prob = make_problem(samples, opt.amplitude_only);
  return fit_transmission(samples, initial_guess(prob), opt);
}

transmission_fit fit_transmission(const std::vector<transmission_sample>& samples, const transmission_params& guess,
                                  const transmission_fit_options& opt) {
  const auto prob = make_problem(samples, opt.amplitude_only);
  ls_bounds bounds;
  bounds.lower = (Eigen::VectorXd(6) << 0.0, 0.0, 0.0, std::log(1e-3), -300.0, -1e3).finished();
  bounds.upper = (Eigen::VectorXd(6) << 60.0, 60.0, 60.0, std::log(1e2), 300.0, 1e3).finished();
  ls_options lo = opt.ls;
  lo.condition_threshold = opt.condition_threshold;
  lo.scale_covariance = std::none_of(samples.begin(), samples.end(), [](const auto& s) { return s.uncertainty > 0; });
  auto f = [&prob](const Eigen::VectorXd& x) { return prob.residuals(x); };
  auto fit = least_squares(residual_fn(f), prob.encode(guess), bounds, lo);

  transmission_fit out;
  out.params = prob.decode(fit.x);
  out.sigma.gamma1 = out.params.gamma1 * fit.sigma[0];
  out.sigma.gamma10_nr = out.params.gamma10_nr * fit.sigma[1];
  out.sigma.gamma_phi = out.params.gamma_phi * fit.sigma[2];
  out.sigma.temperature = out.params.temperature * fit.sigma[3];
  out.sigma.attenuation_db = fit.sigma[4];
  out.sigma.delta = prob.omega_span * fit.sigma[5];
  environment_rates env{out.params.gamma1, out.params.gamma10_nr, out.params.gamma_phi, out.params.temperature,
                        out.params.temperature};
  out.t_eff = thermal_rates(env, out.params.delta).t_eff;
  out.rms_residual = fit.residual_norm / std::sqrt(static_cast<double>(fit.residuals.size()));
  // the T / non-radiative pair shares one combination in the thermal factor
  const Eigen::MatrixXd& cov = fit.covariance;
  const double corr = cov(1, 1) > 0 && cov(3, 3) > 0 ? cov(1, 3) / std::sqrt(cov(1, 1) * cov(3, 3)) : 0.0;
  out.degenerate = fit.ill_conditioned || std::abs(corr) > 0.99;
  out.fit = std::move(fit);
  return out;
}

}  // namespace tcq
