#include "tcq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/fft.hpp"
#include "tcq/least_squares.hpp"
#include "tcq/scattering.hpp"

namespace tcq {

namespace {

double axis_step(const std::vector<double>& a) { return (a.back() - a.front()) / static_cast<double>(a.size() - 1); }

void check_axis(const std::vector<double>& a, const char* name) {
  if (a.size() < 8) throw data_error(std::string(name) + " axis needs at least 8 points");
  const double h = axis_step(a);
  if (!(h > 0)) throw data_error(std::string(name) + " axis must be increasing");
  for (std::size_t i = 1; i < a.size(); ++i)
    if (std::abs(a[i] - a[0] - h * static_cast<double>(i)) > 1e-6 * h)
      throw data_error(std::string(name) + " axis must be uniformly spaced");
}

// correlation sum_x X(x) X(x + u) or convolution sum_x X(x) X(z - x) of the Gaussian-smoothed image,
// zero padded to twice the size; smoothing widens sharp contour peaks for the subpixel fit
Eigen::MatrixXd fft_product(const Eigen::MatrixXd& x, bool convolve, double blur) {
  const int nb = static_cast<int>(x.rows()), ne = static_cast<int>(x.cols());
  const int pb = 2 * nb, pe = 2 * ne;
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(pb) * pe);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < ne; ++j) buf[static_cast<std::size_t>(i) * pe + j] = x(i, j);
  fft_plan plan({pb, pe});
  plan.forward(buf.data());
  const double twopi = 2.0 * constants::pi;
  for (int i = 0; i < pb; ++i) {
    const double kb = twopi * (i < pb / 2 ? i : i - pb) / pb;
    for (int j = 0; j < pe; ++j) {
      const double ke = twopi * (j < pe / 2 ? j : j - pe) / pe;
      auto& c = buf[static_cast<std::size_t>(i) * pe + j];
      c = (convolve ? c * c : std::complex<double>(std::norm(c))) * std::exp(-blur * blur * (kb * kb + ke * ke));
    }
  }
  plan.backward(buf.data());
  Eigen::MatrixXd out(pb, pe);
  const double s = 1.0 / (static_cast<double>(pb) * pe);
  for (int i = 0; i < pb; ++i)
    for (int j = 0; j < pe; ++j) out(i, j) = buf[static_cast<std::size_t>(i) * pe + j].real() * s;
  return out;
}

// stationary point of a quadratic fitted to the 3x3 neighbourhood
template <class F>
Eigen::Vector2d subpixel(F&& f, int u, int v) {
  Eigen::Matrix<double, 9, 6> a;
  Eigen::Matrix<double, 9, 1> z;
  int k = 0;
  for (int du = -1; du <= 1; ++du)
    for (int dv = -1; dv <= 1; ++dv, ++k) {
      a.row(k) << 1.0, du, dv, du * du, du * dv, dv * dv;
      z[k] = f(u + du, v + dv);
    }
  const Eigen::Matrix<double, 6, 1> c = a.colPivHouseholderQr().solve(z);
  Eigen::Matrix2d h;
  h << 2 * c[3], c[4], c[4], 2 * c[5];
  Eigen::Vector2d off = Eigen::Vector2d::Zero();
  if (h.determinant() > 0 && h(0, 0) < 0) {
    off = h.ldlt().solve(-Eigen::Vector2d(c[1], c[2]));
    if (off.cwiseAbs().maxCoeff() > 1.0) off.setZero();
  }
  return Eigen::Vector2d(u, v) + off;
}

// steepest ascent from a start point, limited to a few steps
template <class F, class In>
std::pair<int, int> climb(F&& f, In&& inside, int u, int v, int steps = 4) {
  for (int s = 0; s < steps; ++s) {
    int bu = u, bv = v;
    double best = f(u, v);
    for (int du = -1; du <= 1; ++du)
      for (int dv = -1; dv <= 1; ++dv) {
        if (!inside(u + du, v + dv)) continue;
        const double x = f(u + du, v + dv);
        if (x > best) {
          best = x;
          bu = u + du;
          bv = v + dv;
        }
      }
    if (bu == u && bv == v) break;
    u = bu;
    v = bv;
  }
  return {u, v};
}


Eigen::MatrixXd gaussian_blur(const Eigen::MatrixXd& x, double sigma) {
  const int nb = static_cast<int>(x.rows()), ne = static_cast<int>(x.cols());
  const int pb = 2 * nb, pe = 2 * ne;
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(pb) * pe);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < ne; ++j) buf[static_cast<std::size_t>(i) * pe + j] = x(i, j);
  fft_plan plan({pb, pe});
  plan.forward(buf.data());
  const double twopi = 2.0 * constants::pi;
  for (int i = 0; i < pb; ++i) {
    const double kb = twopi * (i < pb / 2 ? i : i - pb) / pb;
    for (int j = 0; j < pe; ++j) {
      const double ke = twopi * (j < pe / 2 ? j : j - pe) / pe;
      buf[static_cast<std::size_t>(i) * pe + j] *= std::exp(-0.5 * sigma * sigma * (kb * kb + ke * ke));
    }
  }
  plan.backward(buf.data());
  Eigen::MatrixXd out(nb, ne);
  const double s = 1.0 / (static_cast<double>(pb) * pe);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < ne; ++j) out(i, j) = buf[static_cast<std::size_t>(i) * pe + j].real() * s;
  return out;
}

// Catmull-Rom bicubic sampling; NaN outside the interior
double sample(const Eigen::MatrixXd& b, double u, double v) {
  const int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(v));
  if (i < 1 || j < 1 || i + 2 >= b.rows() || j + 2 >= b.cols()) return std::numeric_limits<double>::quiet_NaN();
  auto cubic = [](double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
  };
  const double tu = u - i, tv = v - j;
  double col[4];
  for (int k = 0; k < 4; ++k)
    col[k] = cubic(b(i - 1, j + k - 1), b(i, j + k - 1), b(i + 1, j + k - 1), b(i + 2, j + k - 1), tu);
  return cubic(col[0], col[1], col[2], col[3], tv);
}

// pixels x whose partner sign * x + shift stays in the interior with a margin
std::vector<std::pair<int, int>> overlap_mask(const Eigen::MatrixXd& b, const Eigen::Vector2d& shift, int sign) {
  std::vector<std::pair<int, int>> m;
  const double margin = 4.0;
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      const double u = sign * i + shift.x(), v = sign * j + shift.y();
      if (u >= margin && v >= margin && u <= b.rows() - 1 - margin && v <= b.cols() - 1 - margin) m.emplace_back(i, j);
    }
  return m;
}

// minimises sum_x (B(x) - B(sign x + shift))^2 over shift, starting from a coarse estimate
Eigen::Vector2d register_shift(const Eigen::MatrixXd& b, const Eigen::Vector2d& start, int sign) {
  const auto mask = overlap_mask(b, start, sign);
  if (mask.size() < 16) return start;
  auto f = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(mask.size()));
    for (std::size_t k = 0; k < mask.size(); ++k) {
      const auto [i, j] = mask[k];
      r[static_cast<Eigen::Index>(k)] = b(i, j) - sample(b, sign * i + t[0], sign * j + t[1]);
    }
    return r;
  };
  ls_bounds bounds;
  bounds.lower = start.array() - 2.0;
  bounds.upper = start.array() + 2.0;
  ls_options o;
  o.fd_step = 1e-4;
  const auto fit = least_squares(residual_fn(f), Eigen::VectorXd(start), bounds, o);
  return fit.x;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

void scan2d::validate() const {
  check_axis(i_beta, "i_beta");
  check_axis(i_eps, "i_eps");
  if (values.rows() != static_cast<Eigen::Index>(i_beta.size()) ||
      values.cols() != static_cast<Eigen::Index>(i_eps.size()))
    throw data_error("scan values do not match the axes");
  if (!values.allFinite()) throw data_error("scan values are not finite");
}

double scan2d::step_beta() const { return axis_step(i_beta); }
double scan2d::step_eps() const { return axis_step(i_eps); }

flux_bias currents_to_fluxes(const crosstalk_map& map, double i_beta, double i_eps) {
  const double det = map.det();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * map.w.squaredNorm()) throw config_error("crosstalk matrix is singular");
  const Eigen::Vector2d f = map.w.inverse() * (Eigen::Vector2d(i_beta, i_eps) - map.i0);
  return {f.x() + 0.5, f.y() + 0.5};
}

Eigen::Vector2d fluxes_to_currents(const crosstalk_map& map, const flux_bias& f) {
  return map.i0 + map.w * Eigen::Vector2d(f.f_beta - 0.5, f.f_eps - 0.5);
}

lattice_result lattice_vectors(const scan2d& scan, const lattice_options& opt) {
  scan.validate();
  const int nb = static_cast<int>(scan.i_beta.size()), ne = static_cast<int>(scan.i_eps.size());
  const Eigen::MatrixXd x = scan.values.array() - scan.values.mean();
  const Eigen::MatrixXd r = fft_product(x, false, opt.blur);
  const int pb = 2 * nb, pe = 2 * ne;
  const double r00 = r(0, 0) / (static_cast<double>(nb) * ne);
  if (!(r00 > 0)) throw periodicity_error("scan has no contrast");
  auto rn = [&](int u, int v) {
    const double c = r(((u % pb) + pb) % pb, ((v % pe) + pe) % pe);
    return c / (static_cast<double>(nb - std::abs(u)) * (ne - std::abs(v)) * r00);
  };
  const int ub = nb / 2, vb = ne / 2;
  auto inside = [&](int u, int v) { return std::abs(u) <= ub && std::abs(v) <= vb; };

  struct peak {
    int u, v;
    double value;
  };
  std::vector<peak> peaks;
  for (int u = 0; u < ub; ++u)
    for (int v = -vb + 1; v < vb; ++v) {
      if (u == 0 && v <= 0) continue;
      const double c = rn(u, v);
      if (c < opt.min_peak) continue;
      bool top = true;
      for (int du = -1; du <= 1 && top; ++du)
        for (int dv = -1; dv <= 1; ++dv)
          if ((du || dv) && rn(u + du, v + dv) > c) {
            top = false;
            break;
          }
      if (top) peaks.push_back({u, v, c});
    }
  double best = 0;
  for (const auto& p : peaks) best = std::max(best, p.value);
  std::vector<Eigen::Vector2d> cand;
  std::vector<double> cval;
  for (const auto& p : peaks)
    if (p.value >= opt.relative_peak * best) {
      cand.push_back(subpixel(rn, p.u, p.v));
      cval.push_back(p.value);
    }
  // lengths in units of the scan extent so that the two axes weigh alike
  const Eigen::Vector2d unit(1.0 / nb, 1.0 / ne);
  auto len = [&](const Eigen::Vector2d& q) { return q.cwiseProduct(unit).norm(); };
  if (cand.empty()) throw periodicity_error("no autocorrelation peaks above threshold");
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < cand.size(); ++i)
    if (len(cand[i]) < len(cand[i1])) i1 = i;
  std::size_t i2 = cand.size();
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const Eigen::Vector2d a = cand[i1].cwiseProduct(unit), b = cand[i].cwiseProduct(unit);
    if (std::abs(cross(a, b)) <= 0.3 * a.norm() * b.norm()) continue;
    if (i2 == cand.size() || len(cand[i]) < len(cand[i2])) i2 = i;
  }
  if (i2 == cand.size()) {
    std::ostringstream os;
    os << "found " << cand.size() << " autocorrelation peaks but no two independent periods";
    throw periodicity_error(os.str());
  }
  Eigen::Vector2d a = cand[i1], b = cand[i2];
  for (int k = 0; k < 8; ++k) {
    if (len(b) < len(a)) std::swap(a, b);
    const Eigen::Vector2d as = a.cwiseProduct(unit), bs = b.cwiseProduct(unit);
    const double mu = std::round(as.dot(bs) / as.squaredNorm());
    if (mu == 0.0) break;
    b -= mu * a;
  }

  // least squares over every lattice peak in the window
  std::vector<std::array<double, 4>> rows;
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      if (!m && !n) continue;
      const Eigen::Vector2d p = m * a + n * b;
      const int u0 = static_cast<int>(std::lround(p.x())), v0 = static_cast<int>(std::lround(p.y()));
      if (std::abs(u0) > ub - 2 || std::abs(v0) > vb - 2) continue;
      const auto [u, v] = climb(rn, inside, u0, v0);
      if (std::abs(u) > ub - 1 || std::abs(v) > vb - 1 || rn(u, v) < 0.5 * best) continue;
      const Eigen::Vector2d q = subpixel(rn, u, v);
      if ((q - p).norm() > 3.0) continue;
      rows.push_back({double(m), double(n), q.x(), q.y()});
    }
  if (rows.size() >= 2) {
    Eigen::MatrixXd d(rows.size(), 2), y(rows.size(), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      d.row(i) << rows[i][0], rows[i][1];
      y.row(i) << rows[i][2], rows[i][3];
    }
    const Eigen::MatrixXd ab = d.colPivHouseholderQr().solve(y);
    if (ab.allFinite()) {
      a = ab.row(0).transpose();
      b = ab.row(1).transpose();
    }
  }

  {
    const Eigen::MatrixXd smooth = gaussian_blur(x, opt.register_blur);
    a = register_shift(smooth, a, 1);
    b = register_shift(smooth, b, 1);
  }

  const double hb = scan.step_beta(), he = scan.step_eps();
  Eigen::Matrix2d w;
  w.col(0) << a.x() * hb, a.y() * he;
  w.col(1) << b.x() * hb, b.y() * he;

  // gradient energy of the image along each candidate flux direction
  Eigen::Vector2d energy = Eigen::Vector2d::Zero();
  for (int i = 1; i + 1 < nb; ++i)
    for (int j = 1; j + 1 < ne; ++j) {
      const double gb = (scan.values(i + 1, j) - scan.values(i - 1, j)) / (2 * hb);
      const double ge = (scan.values(i, j + 1) - scan.values(i, j - 1)) / (2 * he);
      for (int c = 0; c < 2; ++c) energy[c] += std::pow(gb * w(0, c) + ge * w(1, c), 2);
    }
  bool swap = false;
  if (opt.assignment == lattice_assignment::sensitivity) {
    swap = energy[0] > energy[1];  // the qubit loop responds more strongly
  } else {
    swap = std::abs(w(0, 1)) / w.col(1).norm() > std::abs(w(0, 0)) / w.col(0).norm();
  }
  lattice_result out;
  out.peak_strength << rn(static_cast<int>(std::lround(a.x())), static_cast<int>(std::lround(a.y()))),
      rn(static_cast<int>(std::lround(b.x())), static_cast<int>(std::lround(b.y())));
  if (swap) {
    w.col(0).swap(w.col(1));
    std::swap(energy[0], energy[1]);
    std::swap(out.peak_strength[0], out.peak_strength[1]);
  }
  if (w(0, 0) < 0) w.col(0) *= -1;
  if (w(1, 1) < 0) w.col(1) *= -1;
  out.w = w;
  out.sensitivity = energy;
  out.peaks_used = static_cast<int>(rows.size());
  return out;
}

offset_result offsets(const scan2d& scan, const Eigen::Matrix2d& w, const offset_options& opt) {
  scan.validate();
  if (std::abs(w.determinant()) <= 1e-12 * w.squaredNorm()) throw config_error("crosstalk matrix is singular");
  const int nb = static_cast<int>(scan.i_beta.size()), ne = static_cast<int>(scan.i_eps.size());
  const Eigen::MatrixXd x = scan.values.array() - scan.values.mean();
  const Eigen::MatrixXd c = fft_product(x, true, opt.blur);
  auto cn = [&](int zb, int ze) {
    const double overlap = static_cast<double>(nb - std::abs(zb - (nb - 1))) * (ne - std::abs(ze - (ne - 1)));
    return overlap > 0 ? c(zb, ze) / overlap : 0.0;
  };
  auto inside = [&](int zb, int ze) { return std::abs(zb - (nb - 1)) <= nb / 2 && std::abs(ze - (ne - 1)) <= ne / 2; };
  int bzb = nb - 1, bze = ne - 1;
  double best = -std::numeric_limits<double>::infinity();
  for (int zb = 0; zb < 2 * nb - 1; ++zb)
    for (int ze = 0; ze < 2 * ne - 1; ++ze)
      if (inside(zb, ze) && cn(zb, ze) > best) {
        best = cn(zb, ze);
        bzb = zb;
        bze = ze;
      }
  const double hb = scan.step_beta(), he = scan.step_eps();
  Eigen::Matrix2d wp;  // lattice in pixels
  wp.row(0) = w.row(0) / hb;
  wp.row(1) = w.row(1) / he;
  // the convolution peaks repeat on the full lattice; average the implied centres
  Eigen::Vector2d z0 = subpixel(cn, bzb, bze), sum = Eigen::Vector2d::Zero();
  int used = 0;
  for (int m = -3; m <= 3; ++m)
    for (int n = -3; n <= 3; ++n) {
      const Eigen::Vector2d p = z0 + wp * Eigen::Vector2d(m, n);
      const int u0 = static_cast<int>(std::lround(p.x())), v0 = static_cast<int>(std::lround(p.y()));
      if (!inside(u0, v0) || u0 < 1 || v0 < 1 || u0 > 2 * nb - 3 || v0 > 2 * ne - 3) continue;
      const auto [u, v] = climb(cn, inside, u0, v0);
      if (u < 1 || v < 1 || u > 2 * nb - 3 || v > 2 * ne - 3 || cn(u, v) < 0.5 * best) continue;
      const Eigen::Vector2d q = subpixel(cn, u, v);
      if ((q - p).norm() > 3.0) continue;
      sum += q - wp * Eigen::Vector2d(m, n);
      ++used;
    }
  Eigen::Vector2d z = used ? Eigen::Vector2d(sum / used) : z0;
  // inversion about c maps x to 2c - x
  z = register_shift(gaussian_blur(x, opt.register_blur), z, -1);
  offset_result out;
  out.inversion_centre << scan.i_beta.front() + 0.5 * z.x() * hb, scan.i_eps.front() + 0.5 * z.y() * he;

  const Eigen::Matrix2d winv = w.inverse();
  const Eigen::Vector2d centre(0.5 * (scan.i_beta.front() + scan.i_beta.back()),
                               0.5 * (scan.i_eps.front() + scan.i_eps.back()));
  std::vector<double> sorted(scan.values.data(), scan.values.data() + scan.values.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double baseline = sorted[sorted.size() / 2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Eigen::Vector2d i0 = out.inversion_centre + w * Eigen::Vector2d(0.5 * a, 0.5 * b);
      i0 += w * (winv * (centre - i0)).array().round().matrix();
      double score = 0;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < ne; ++j) {
          Eigen::Vector2d d = winv * (Eigen::Vector2d(scan.i_beta[i], scan.i_eps[j]) - i0);
          d -= d.array().round().matrix();
          if (d.norm() < opt.radius) score += std::max(0.0, baseline - scan.values(i, j));
        }
      out.candidates.push_back({i0, score});
    }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const auto& p, const auto& q) { return p.score > q.score; });
  out.i0 = out.candidates.front().i0;
  out.ambiguous = out.candidates[1].score >= opt.ambiguity * out.candidates[0].score;
  return out;
}

omega10_model surrogate_model(const surrogate_params& p) {
  const double slope = 2.0 * p.i_p * constants::flux_quantum / constants::hbar;
  return [p, slope](const flux_bias& f) {
    const double cb = std::cos(constants::pi * f.f_beta);
    const double delta = p.delta_min + (p.delta_max - p.delta_min) * cb * cb;
    const double sym = 0.5 + p.sym_swing * std::sin(2.0 * constants::pi * (f.f_beta - 0.5));
    const double eps = slope * std::sin(constants::pi * (f.f_eps - sym)) / constants::pi;
    return std::sqrt(delta * delta + eps * eps);
  };
}

omega10_model tabulated_model(const circuit_params& p, const solver_config& cfg, int points) {
  if (points < 4) throw config_error("tabulated model needs at least 4 points per axis");
  auto table = std::make_shared<Eigen::MatrixXd>(points, points);
  for (int i = 0; i < points; ++i) {
    std::optional<spectrum> warm;
    for (int j = 0; j < points; ++j) {
      const flux_bias b{double(i) / points, double(j) / points};
      auto s = solve_spectrum(p, b, cfg, warm ? &*warm : nullptr);
      (*table)(i, j) = s.omega(1, 0);
      warm = std::move(s);
    }
  }
  return [table, points](const flux_bias& f) {
    auto at = [&](int i, int j) { return (*table)(((i % points) + points) % points, ((j % points) + points) % points); };
    auto cubic = [](double p0, double p1, double p2, double p3, double t) {
      return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
    };
    const double u = f.f_beta * points, v = f.f_eps * points;
    const int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(v));
    const double tu = u - i, tv = v - j;
    double col[4];
    for (int k = 0; k < 4; ++k)
      col[k] = cubic(at(i - 1, j + k - 1), at(i, j + k - 1), at(i + 1, j + k - 1), at(i + 2, j + k - 1), tu);
    return cubic(col[0], col[1], col[2], col[3], tv);
  };
}

scan2d synthesize_scan(const omega10_model& model, const crosstalk_map& map, double probe_omega,
                       const std::vector<double>& i_beta, const std::vector<double>& i_eps,
                       const synthesis_options& opt) {
  if (!(probe_omega > 0)) throw config_error("probe frequency must be positive");
  if (opt.supersample < 1) throw config_error("supersample must be at least 1");
  scan2d s;
  s.i_beta = i_beta;
  s.i_eps = i_eps;
  s.probe_omega = probe_omega;
  s.values.resize(static_cast<Eigen::Index>(i_beta.size()), static_cast<Eigen::Index>(i_eps.size()));
  check_axis(i_beta, "i_beta");
  check_axis(i_eps, "i_eps");
  const double hb = s.step_beta(), he = s.step_eps();
  const coherence co = coherence_times(opt.gamma1, 0.0, opt.gamma_phi);
  const double r0 = on_resonance_reflection(co.t2, opt.gamma1, 0.0);
  const int ss = opt.supersample;
  for (std::size_t i = 0; i < i_beta.size(); ++i)
    for (std::size_t j = 0; j < i_eps.size(); ++j) {
      double acc = 0;
      for (int a = 0; a < ss; ++a)
        for (int b = 0; b < ss; ++b) {
          const double ib = i_beta[i] + ((a + 0.5) / ss - 0.5) * hb;
          const double ie = i_eps[j] + ((b + 0.5) / ss - 0.5) * he;
          const double delta = probe_omega - model(currents_to_fluxes(map, ib, ie));
          acc += std::abs(delta) * co.t2 > opt.cutoff ? 1.0
                                                      : std::abs(transmission(delta, co.t1, co.t2, opt.gamma1, 0.0, r0));
        }
      s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc / (ss * ss);
    }
  if (opt.noise > 0) {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, opt.noise);
    for (Eigen::Index i = 0; i < s.values.rows(); ++i)
      for (Eigen::Index j = 0; j < s.values.cols(); ++j) s.values(i, j) *= 1.0 + nd(rng);
  }
  return s;
}

std::vector<double> uniform_axis(double lo, double hi, int points) {
  if (points < 2) throw config_error("axis needs at least two points");
  std::vector<double> a(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) a[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return a;
}

}  // namespace tcq
