#include "tcq/reflections.hpp"

#include <cmath>
#include <sstream>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

namespace {

using cplx = std::complex<double>;
constexpr double two_pi = 2.0 * constants::pi;

double wrap_2pi(double x) {
  x = std::fmod(x, two_pi);
  return x < 0 ? x + two_pi : x;
}

}  // namespace

void filter_model::validate() const {
  if (std::abs(s12 - s21) > 1e-10) throw config_error("filter must be reciprocal");
  Eigen::Matrix2cd s;
  s << s11, s12, s21, s22;
  if ((s.adjoint() * s - Eigen::Matrix2cd::Identity()).norm() > 1e-10) throw config_error("filter must be lossless");
  if (!(std::abs(s11) < 1.0)) throw config_error("filter must transmit");
  if (!(z_q > 0) || !(v > 0)) throw config_error("z_q and v must be positive");
}

filter_model filter_model::from_vswr(double vswr, double z_q, double v) {
  const double r = vswr_to_reflection(vswr);
  filter_model f;
  f.s11 = r;
  f.s22 = -r;
  f.s12 = f.s21 = std::sqrt(1.0 - r * r);
  f.z_q = z_q;
  f.v = v;
  return f;
}

double vswr_to_reflection(double vswr) {
  if (!(vswr >= 1.0)) throw config_error("VSWR must be at least 1");
  if (std::isinf(vswr)) return 1.0;
  return (vswr - 1.0) / (vswr + 1.0);
}

Eigen::Matrix2cd shifted_scattering(const filter_model& f, double omega, double d) {
  const cplx p = std::polar(1.0, -omega * d / f.v);
  Eigen::Matrix2cd s;
  s << p * p * f.s11, p * f.s12, p * f.s21, f.s22;
  return s;
}

double mode_info::omega(int parity, int n) const { return v * (theta.at(parity) + two_pi * n) / d; }

std::vector<double> mode_info::omegas(int parity, double lo, double hi) const {
  std::vector<double> out;
  const double fsr = two_pi * v / d;
  for (auto n = static_cast<long>(std::ceil((lo - omega(parity, 0)) / fsr)); omega(parity, static_cast<int>(n)) <= hi; ++n)
    out.push_back(omega(parity, static_cast<int>(n)));
  return out;
}

mode_info mode_spectrum(const filter_model& f, double d, int scan_points) {
  f.validate();
  if (!(d > 0) || !std::isfinite(d)) throw config_error("line length must be positive and finite");
  mode_info m;
  m.d = d;
  m.v = f.v;
  m.scan_points = scan_points;
  auto det_at = [&](double phi) {
    const Eigen::Matrix2cd s = shifted_scattering(f, phi * f.v / d, d);
    return (s(0, 0) * s(1, 1) - (s(0, 1) - 1.0) * (s(1, 0) - 1.0));
  };
  if (std::abs(f.s11) == 0.0) {
    m.theta = {0.0, 0.0};
    m.residual = std::abs(det_at(0.0));
    return m;
  }
  // e^{i(phi - psi/2)} det(S - X) is purely imaginary for a lossless reciprocal component
  const double psi = std::arg(f.s11 * f.s22 - f.s12 * f.s21);
  auto h = [&](double phi) { return (std::polar(1.0, phi - 0.5 * psi) * det_at(phi)).imag(); };
  std::vector<double> roots;
  double a = 0.0, ha = h(a);
  for (int k = 1; k <= scan_points && roots.size() < 2; ++k) {
    const double b = two_pi * k / scan_points;
    const double hb = h(b);
    if (ha == 0.0) {
      roots.push_back(a);
    } else if (ha * hb < 0) {
      double lo = a, hi = b, hl = ha;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if (hm * hl <= 0) {
          hi = mid;
        } else {
          lo = mid;
          hl = hm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ha = hb;
  }
  if (roots.size() < 2) {
    std::ostringstream os;
    os << "mode equation has " << roots.size() << " sign changes over one free spectral range with " << scan_points
       << " scan points";
    throw convergence_error(os.str());
  }
  m.theta = {wrap_2pi(roots[0]), wrap_2pi(roots[1])};
  for (double r : roots) m.residual = std::max(m.residual, std::abs(det_at(r)));
  return m;
}

std::array<cplx, 2> parity_reflection(const filter_model& f, const mode_info& m, int n) {
  std::array<cplx, 2> r{};
  if (std::abs(f.s11) == 0.0) return r;
  for (int s = 0; s < 2; ++s) {
    const Eigen::Matrix2cd sw = shifted_scattering(f, m.omega(s, n), m.d);
    r[s] = f.s11 + f.s12 * f.s21 / ((1.0 - sw(0, 1)) / sw(0, 0) - f.s22);
  }
  return r;
}

std::array<cplx, 2> vswr_parity_reflections(double vswr, double relative_phase) {
  const double r = vswr_to_reflection(vswr);
  return {cplx(r, 0.0), std::polar(r, relative_phase)};
}

double relaxation_with_reflection(cplx gamma5_01, double omega, cplx r0, cplx r1, double z_q, double v, double z0) {
  if (!(omega > 0)) throw config_error("frequency must be positive");
  const double phi0 = constants::phi0;
  const double base = phi0 * phi0 * std::norm(gamma5_01) * omega / (2.0 * constants::hbar * z0);
  const cplx out = std::polar(1.0, -omega * z_q / v), back = std::polar(1.0, omega * z_q / v);
  double g = 0;
  for (cplx r : {r0, r1}) g += base / (1.0 + std::norm(r)) * std::norm(out - r * back);
  return g;
}

}  // namespace tcq
