#include "tcq/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tcq/errors.hpp"

namespace tcq {

const char* to_string(ls_status s) {
  switch (s) {
    case ls_status::gradient: return "gradient";
    case ls_status::step: return "step";
    case ls_status::cost: return "cost";
    case ls_status::max_iterations: return "max_iterations";
  }
  return "unknown";
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct box {
  Eigen::VectorXd lo, hi;
  box(const ls_bounds& b, Eigen::Index n) {
    lo = b.lower.size() ? b.lower : Eigen::VectorXd::Constant(n, -inf);
    hi = b.upper.size() ? b.upper : Eigen::VectorXd::Constant(n, inf);
    if (lo.size() != n || hi.size() != n) throw config_error("bounds have the wrong dimension");
    if ((lo.array() > hi.array()).any()) throw config_error("lower bound above upper bound");
  }
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

// gradient components that cannot decrease the cost because a bound blocks them
Eigen::VectorXd projected(const Eigen::VectorXd& g, const Eigen::VectorXd& x, const box& b) {
  Eigen::VectorXd p = g;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (x[i] <= b.lo[i] && g[i] > 0) p[i] = 0;
    if (x[i] >= b.hi[i] && g[i] < 0) p[i] = 0;
  }
  return p;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Eigen::MatrixXd numeric_jacobian(const residual_fn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                                 const ls_bounds& bounds, double rel_step) {
  const box b(bounds, x.size());
  Eigen::MatrixXd j(r0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] = std::min(x[i] + h, b.hi[i]);
    xm[i] = std::max(x[i] - h, b.lo[i]);
    const double span = xp[i] - xm[i];
    if (span <= 0) {
      j.col(i).setZero();
      continue;
    }
    const Eigen::VectorXd rp = xp[i] == x[i] ? r0 : f(xp);
    const Eigen::VectorXd rm = xm[i] == x[i] ? r0 : f(xm);
    j.col(i) = (rp - rm) / span;
  }
  return j;
}

ls_result least_squares(const ls_model& model, const Eigen::VectorXd& x0, const ls_bounds& bounds,
                        const ls_options& opt) {
  const Eigen::Index n = x0.size();
  const box b(bounds, n);
  ls_result res;
  Eigen::VectorXd x = b.clamp(x0);
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  model(x, r, &j);
  ++res.evaluations;
  if (!finite(r) || !j.allFinite()) throw data_error("residuals are not finite at the starting point");
  const Eigen::Index m = r.size();
  if (j.rows() != m || j.cols() != n) throw error("Jacobian has the wrong shape");
  double cost = 0.5 * r.squaredNorm();

  double lambda = opt.initial_damping;  // zero tries Gauss-Newton first
  double nu = 2.0;
  int trials = 0;
  res.status = ls_status::max_iterations;
  while (res.iterations < opt.max_iterations && trials < 20 * opt.max_iterations) {
    const Eigen::VectorXd g = j.transpose() * r;
    const Eigen::VectorXd pg = projected(g, x, b);
    const double jscale = j.colwise().norm().maxCoeff();
    const double gscale = std::max(r.norm() * jscale, std::numeric_limits<double>::min());
    if (pg.lpNorm<Eigen::Infinity>() <= opt.gradient_tol * gscale || pg.lpNorm<Eigen::Infinity>() == 0.0) {
      res.status = ls_status::gradient;
      break;
    }
    std::vector<Eigen::Index> freev;
    for (Eigen::Index i = 0; i < n; ++i)
      if (pg[i] != 0.0 || (x[i] > b.lo[i] && x[i] < b.hi[i])) freev.push_back(i);
    const auto nf = static_cast<Eigen::Index>(freev.size());
    Eigen::MatrixXd a(nf, nf);
    Eigen::VectorXd gf(nf);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    for (Eigen::Index p = 0; p < nf; ++p) {
      gf[p] = g[freev[p]];
      for (Eigen::Index q = 0; q < nf; ++q) a(p, q) = jtj(freev[p], freev[q]);
    }
    const double dmax = std::max(a.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    Eigen::MatrixXd damped = a;
    for (Eigen::Index p = 0; p < nf; ++p) damped(p, p) += lambda * std::max(a(p, p), 1e-12 * dmax);
    Eigen::VectorXd df;
    if (lambda == 0.0) {
      df = damped.completeOrthogonalDecomposition().solve(-gf);
    } else {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      df = ldlt.solve(-gf);
    }
    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    for (Eigen::Index p = 0; p < nf; ++p) step[freev[p]] = df[p];
    ++trials;
    if (opt.geodesic_acceleration && lambda > 0.0) {
      // second directional derivative along the step by a finite difference
      const double h = 0.1;
      const Eigen::VectorXd xh = b.clamp(x + h * step);
      Eigen::VectorXd rh;
      model(xh, rh, nullptr);
      ++res.evaluations;
      if (finite(rh)) {
        const Eigen::VectorXd rvv = (2.0 / h) * ((rh - r) / h - j * ((xh - x) / h));
        const Eigen::VectorXd jr = j.transpose() * rvv;
        Eigen::VectorXd jrf(nf);
        for (Eigen::Index p = 0; p < nf; ++p) jrf[p] = jr[freev[p]];
        const Eigen::VectorXd af = Eigen::LDLT<Eigen::MatrixXd>(damped).solve(-jrf);
        if (2.0 * af.norm() > 0.75 * df.norm()) {
          lambda *= nu;
          nu *= 2.0;
          continue;
        }
        for (Eigen::Index p = 0; p < nf; ++p) step[freev[p]] += 0.5 * af[p];
      }
    }
    const Eigen::VectorXd xn = b.clamp(x + step);
    const Eigen::VectorXd dx = xn - x;
    if (dx.norm() <= opt.step_tol * (x.norm() + opt.step_tol)) {
      res.status = ls_status::step;
      break;
    }
    Eigen::VectorXd rn;
    model(xn, rn, nullptr);
    ++res.evaluations;
    const double cn = finite(rn) ? 0.5 * rn.squaredNorm() : inf;
    const double predicted = -(g.dot(dx) + 0.5 * dx.dot(jtj * dx));
    if (cn < cost) {
      const double rho = predicted > 0 ? (cost - cn) / predicted : 1.0;
      const double drop = cost - cn;
      x = xn;
      model(x, r, &j);
      ++res.evaluations;
      cost = 0.5 * r.squaredNorm();
      ++res.iterations;
      if (lambda > 0) lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (drop <= opt.cost_tol * cost) {
        res.status = ls_status::cost;
        break;
      }
    } else {
      lambda = lambda == 0.0 ? 1e-3 : lambda * nu;
      nu *= 2.0;
      if (lambda > 1e16) {
        res.status = ls_status::cost;
        break;
      }
    }
  }

  res.x = x;
  res.residuals = r;
  res.jacobian = j;
  res.cost = cost;
  res.residual_norm = r.norm();
  res.gradient_norm = projected(j.transpose() * r, x, b).lpNorm<Eigen::Infinity>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (x[i] <= b.lo[i] || x[i] >= b.hi[i]) res.active.push_back(static_cast<int>(i));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  const double smin = s.size() ? s.minCoeff() : 0.0;
  res.condition_number = smin > 0 ? smax / smin : inf;
  res.rank_deficient = s.size() < n || !(smin > opt.rank_tol * smax);
  res.ill_conditioned = res.rank_deficient || res.condition_number > opt.condition_threshold;
  Eigen::VectorXd inv2 = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > opt.rank_tol * smax) inv2[i] = 1.0 / (s[i] * s[i]);
  res.covariance = svd.matrixV() * inv2.asDiagonal() * svd.matrixV().transpose();
  if (opt.scale_covariance && m > n) res.covariance *= 2.0 * cost / static_cast<double>(m - n);
  res.sigma = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();

  std::ostringstream os;
  os << "stopped on " << to_string(res.status) << " after " << res.iterations << " iterations";
  if (res.rank_deficient) os << "; Jacobian is rank deficient (condition " << res.condition_number << ")";
  else if (res.ill_conditioned) os << "; parameters poorly identifiable (condition " << res.condition_number << ")";
  res.message = os.str();
  return res;
}

ls_result least_squares(const residual_fn& f, const Eigen::VectorXd& x0, const ls_bounds& bounds,
                        const ls_options& opt, const jacobian_fn& jac) {
  auto model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* j) {
    r = f(x);
    if (j) *j = jac ? jac(x) : numeric_jacobian(f, x, r, bounds, opt.fd_step);
  };
  return least_squares(model, x0, bounds, opt);
}

}  // namespace tcq
