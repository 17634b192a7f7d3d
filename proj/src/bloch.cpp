#include "tcq/bloch.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "tcq/errors.hpp"
#include "tcq/scattering.hpp"

namespace tcq {

namespace {

using state = std::array<double, 3>;  // X, Y (rotating frame), z

struct rates {
  double t1, t2, z0;
};

rates bloch_rates(const bloch_params& p) {
  const auto c = coherence_times(p.gamma10, p.gamma01, p.gamma_phi);
  if (!std::isfinite(c.t1) || !std::isfinite(c.t2)) throw config_error("Bloch oracle needs finite T1 and T2");
  const double g = p.gamma10 + p.gamma01;
  return {c.t1, c.t2, (p.gamma01 - p.gamma10) / g};
}

}  // namespace

sigma_x_response sigma_x_analytic(const bloch_params& p) {
  const auto r = bloch_rates(p);
  const double d = p.omega_p - p.omega10;
  const double den = 1.0 + d * d * r.t2 * r.t2 + r.t1 * r.t2 * p.omega_r * p.omega_r;
  const double amp = r.z0 * r.t2 * p.omega_r / den;
  sigma_x_response s;
  s.sin_coeff = amp;
  s.cos_coeff = -amp * d * r.t2;
  s.z = r.z0 * (1.0 + d * d * r.t2 * r.t2) / den;
  return s;
}

oracle_result sigma_x_oracle(const bloch_params& p, const oracle_options& opt) {
  namespace ode = boost::numeric::odeint;
  const auto r = bloch_rates(p);
  const double d = p.omega_p - p.omega10;
  const double wr = p.omega_r;
  const double wp = p.omega_p;

  // u = X + iY = (x + iy) e^{-i wp t}; RWA drops the e^{-2i wp t} parts
  auto rwa = [&](const state& s, state& ds, double) {
    const double x = s[0], y = s[1], z = s[2];
    ds[0] = d * y - x / r.t2;
    ds[1] = -d * x - wr * z - y / r.t2;
    ds[2] = wr * y - (z - r.z0) / r.t1;
  };
  auto full = [&](const state& s, state& ds, double t) {
    const double x = s[0], y = s[1], z = s[2];
    const double c2 = std::cos(2.0 * wp * t), s2 = std::sin(2.0 * wp * t);
    // -i wr (1 + e^{-2i wp t}) z
    ds[0] = d * y - x / r.t2 - wr * z * s2;
    ds[1] = -d * x - wr * z - y / r.t2 - wr * z * c2;
    // 2 wr cos(wp t) Im(u e^{i wp t})
    const double ct = std::cos(wp * t), st = std::sin(wp * t);
    ds[2] = 2.0 * wr * ct * (y * ct + x * st) - (z - r.z0) / r.t1;
  };

  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<state>());
  state s{0.0, 0.0, r.z0};
  const double tau = std::max(r.t1, r.t2);
  double chunk = 2.0 * tau;
  if (opt.full_drive) {
    // whole drive periods so successive chunks sample the same phase
    const double period = 2.0 * 3.141592653589793 / wp;
    chunk = std::ceil(chunk / period) * period;
  }
  double t = 0.0;
  oracle_result out;
  for (int k = 0; k < opt.max_chunks; ++k) {
    const state before = s;
    const double dt0 = opt.full_drive ? 0.05 / wp : 1e-2 * tau;
    if (opt.full_drive)
      ode::integrate_adaptive(stepper, full, s, t, t + chunk, dt0);
    else
      ode::integrate_adaptive(stepper, rwa, s, t, t + chunk, dt0);
    t += chunk;
    double change = 0.0;
    for (int i = 0; i < 3; ++i) change = std::max(change, std::abs(s[i] - before[i]));
    out.chunks = k + 1;
    out.last_change = change;
    if (change < opt.settle) {
      out.elapsed = t;
      // lab frame x = X cos(wp t) - Y sin(wp t)
      out.response.cos_coeff = s[0];
      out.response.sin_coeff = -s[1];
      out.response.z = s[2];
      return out;
    }
  }
  std::ostringstream os;
  os << "Bloch integration did not settle after " << opt.max_chunks << " chunks (t = " << t
     << " s, last change " << out.last_change << ")";
  throw convergence_error(os.str());
}

}  // namespace tcq
