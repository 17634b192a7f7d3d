#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tcq {

struct ls_bounds {
  Eigen::VectorXd lower;  // empty means unbounded
  Eigen::VectorXd upper;
};

struct ls_options {
  int max_iterations = 200;
  double gradient_tol = 1e-10;  // projected |J^T r|_inf relative to |r| * max column norm of J
  double step_tol = 1e-12;
  double cost_tol = 1e-15;
  double fd_step = 1e-6;        // relative central-difference step
  double rank_tol = 1e-12;      // s_min / s_max below this is rank deficient
  double condition_threshold = 1e8;
  double initial_damping = 0.0;  // zero tries the undamped Gauss-Newton step first
  bool geodesic_acceleration = false;  // one extra residual evaluation per damped trial
  bool scale_covariance = true;  // multiply by residual variance (uniform weights)
};

enum class ls_status { gradient, step, cost, max_iterations };

const char* to_string(ls_status s);

struct ls_result {
  Eigen::VectorXd x;
  Eigen::VectorXd sigma;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  // 0.5 |r|^2
  double residual_norm = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  ls_status status = ls_status::max_iterations;
  std::vector<int> active;  // parameters sitting on a bound
  bool rank_deficient = false;
  double condition_number = 0.0;
  bool ill_conditioned = false;
  std::string message;

  bool converged() const { return status != ls_status::max_iterations; }
};

// r(x) and optionally J(x); J is nullptr when only residuals are needed
using ls_model = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;
using residual_fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using jacobian_fn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// bounded Levenberg-Marquardt; tries the Gauss-Newton step first
ls_result least_squares(const ls_model& model, const Eigen::VectorXd& x0, const ls_bounds& bounds = {},
                        const ls_options& opt = {});

// numeric central-difference Jacobian unless jac is supplied
ls_result least_squares(const residual_fn& f, const Eigen::VectorXd& x0, const ls_bounds& bounds = {},
                        const ls_options& opt = {}, const jacobian_fn& jac = {});

Eigen::MatrixXd numeric_jacobian(const residual_fn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                                 const ls_bounds& bounds, double rel_step);

}  // namespace tcq
