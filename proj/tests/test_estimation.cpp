#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/estimation.hpp"
#include "tcq/least_squares.hpp"

using namespace tcq;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

std::vector<spectroscopy_sample> two_level_data(double delta, double ip, double fs, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<spectroscopy_sample> out;
  for (int k = -6; k <= 6; ++k) {
    const double fe = fs + 0.0012 * k;
    const double eps = 2 * ip * constants::flux_quantum * (fe - fs) / constants::hbar;
    out.push_back({0.42, fe, std::sqrt(delta * delta + eps * eps) * (1 + noise * n(rng)), 0.0});
  }
  return out;
}

transmission_params fig5_truth() {
  return {two_pi * 244e6, two_pi * 10e6, two_pi * 40e6, 0.05, 82.0, two_pi * 5.7e9};
}

std::vector<transmission_sample> transmission_data(const transmission_params& p, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<transmission_sample> out;
  for (double pw = -48; pw <= -24; pw += 6)
    for (int k = 0; k <= 100; ++k) {
      const double w = p.delta + two_pi * 1e9 * (k - 50) / 50.0;
      const auto t = transmission_curve(p, pw, w);
      out.push_back({pw, w, t + noise * std::complex<double>(n(rng), n(rng)), 0.0});
    }
  return out;
}

}  // namespace

TEST_SUITE("least_squares") {
  TEST_CASE("linear problem matches the normal equations") {
    Eigen::MatrixXd a(6, 3);
    a << 1, 2, 0, 0, 1, 1, 3, 0, 1, 1, 1, 1, 2, -1, 0, 0, 0, 4;
    Eigen::VectorXd y(6);
    y << 1, 2, 0.5, -1, 3, 2;
    const Eigen::VectorXd oracle = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    const auto r = least_squares(residual_fn([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x - y; }),
                                 Eigen::VectorXd::Zero(3));
    CHECK((r.x - oracle).norm() < 1e-10);
    CHECK(r.converged());
  }

  TEST_CASE("Rosenbrock") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd r(2);
      r << 10 * (x[1] - x[0] * x[0]), 1 - x[0];
      return r;
    };
    const auto r = least_squares(residual_fn(f), Eigen::Vector2d(-1.2, 1.0));
    CHECK(std::abs(r.x[0] - 1) < 1e-8);
    CHECK(std::abs(r.x[1] - 1) < 1e-8);
    CHECK(r.active.empty());

    ls_bounds b{Eigen::Vector2d(-5, -5), Eigen::Vector2d(0.5, 5)};
    const auto rb = least_squares(residual_fn(f), Eigen::Vector2d(-1.2, 1.0), b);
    CHECK(rb.x[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rb.x[1] == doctest::Approx(0.25).epsilon(1e-8));
    REQUIRE(rb.active.size() == 1);
    CHECK(rb.active[0] == 0);
  }

  TEST_CASE("rank deficiency is diagnosed") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd r(3);
      r << x[0] + x[1] - 1, 2 * (x[0] + x[1]) - 2.2, x[0] + x[1];
      return r;
    };
    const auto r = least_squares(residual_fn(f), Eigen::Vector2d(0.0, 0.0));
    CHECK(r.rank_deficient);
    CHECK(r.ill_conditioned);
    CHECK(r.x.allFinite());
  }

  TEST_CASE("non-finite start is rejected") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(2, std::log(x[0])); };
    CHECK_THROWS_AS(least_squares(residual_fn(f), Eigen::VectorXd::Constant(1, -1.0)), data_error);
  }

  TEST_CASE("analytic and numeric Jacobians agree") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd r(2);
      r << std::sin(x[0]) * x[1], std::exp(x[1]);
      return r;
    };
    const Eigen::Vector2d x(0.3, 0.7);
    const Eigen::MatrixXd j = numeric_jacobian(residual_fn(f), x, f(x), {}, 1e-6);
    Eigen::Matrix2d ex;
    ex << std::cos(0.3) * 0.7, std::sin(0.3), 0, std::exp(0.7);
    CHECK((j - ex).norm() < 1e-8);
  }
}

TEST_SUITE("estimation") {
  TEST_CASE("two-level fit recovers Delta, I and the symmetry point") {
    const double delta = two_pi * 5.7e9, ip = 0.1e-6, fs = 0.4331;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto f = fit_two_level(two_level_data(delta, ip, fs, 0.01, seed));
      CHECK(f.delta == doctest::Approx(delta).epsilon(0.02));
      CHECK(f.i_tls == doctest::Approx(ip).epsilon(0.02));
      CHECK(std::abs(f.f_sym - fs) < 0.02 * 0.0072);
    }
    const auto exact = fit_two_level(two_level_data(delta, ip, fs, 0.0, 0));
    CHECK(std::abs(exact.f_sym - fs) < 1e-6);
    auto shuffled = two_level_data(delta, ip, fs, 0.01, 4);
    const auto a = fit_two_level(shuffled);
    std::reverse(shuffled.begin(), shuffled.end());
    const auto b = fit_two_level(shuffled);
    CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-9));
  }

  TEST_CASE("two-level fit rejects one-sided and short data") {
    auto d = two_level_data(two_pi * 5e9, 1e-7, 0.43, 0.0, 0);
    std::vector<spectroscopy_sample> right(d.begin() + 7, d.end());
    CHECK_THROWS_AS(fit_two_level(right), bracket_error);
    std::vector<spectroscopy_sample> few(d.begin() + 4, d.begin() + 8);
    CHECK_THROWS_AS(fit_two_level(few), data_error);
  }

  TEST_CASE("transmission fit: exact data and invariances") {
    const auto truth = fig5_truth();
    auto data = transmission_data(truth, 0.0, 0);
    const auto f = fit_transmission(data);
    CHECK(f.fit.residual_norm < 1e-10);
    CHECK(f.params.gamma1 == doctest::Approx(truth.gamma1).epsilon(0.01));
    CHECK(f.params.delta == doctest::Approx(truth.delta).epsilon(1e-9));
    CHECK(f.degenerate);

    auto noisy = transmission_data(truth, 0.01, 5);
    const auto g = fit_transmission(noisy);
    CHECK(g.params.gamma1 == doctest::Approx(truth.gamma1).epsilon(0.05));
    std::reverse(noisy.begin(), noisy.end());
    const auto h = fit_transmission(noisy);
    CHECK(h.params.gamma1 == doctest::Approx(g.params.gamma1).epsilon(1e-9));
    // P -> P + c together with A -> A + c leaves the model unchanged
    for (auto& s : noisy) s.power_dbm += 7.0;
    const auto k = fit_transmission(noisy);
    CHECK(k.params.gamma1 == doctest::Approx(g.params.gamma1).epsilon(1e-6));
    CHECK(k.params.attenuation_db == doctest::Approx(g.params.attenuation_db + 7.0).epsilon(1e-6));
  }

  TEST_CASE("transmission fit needs three powers") {
    auto data = transmission_data(fig5_truth(), 0.0, 0);
    data.erase(std::remove_if(data.begin(), data.end(), [](const auto& s) { return s.power_dbm > -40; }), data.end());
    CHECK_THROWS_AS(fit_transmission(data), data_error);
  }

  TEST_CASE("circuit fit recovers currents from a perturbed start") {
    const auto truth = default_circuit();
    circuit_fit_options opt;
    opt.solver = solver_config::uniform(2);
    opt.solver.levels = 2;
    opt.solver.eig.force_iterative = true;
    std::vector<spectroscopy_sample> data;
    for (double fb : {0.36, 0.40, 0.44})
      for (double fe : {0.41, 0.425, 0.435, 0.45})
        data.push_back({fb, fe, transition_frequency(truth, {fb, fe}, opt.solver).omega10, 0.0});
    auto start = truth;
    const std::array<double, 6> kick{1.06, 0.93, 1.04, 0.95, 1.08, 0.97};
    for (int j = 0; j < 6; ++j) start.ic[j] *= kick[j];
    const auto f = fit_circuit(start, data, opt);
    for (int j = 0; j < 6; ++j) CHECK(f.params.ic[j] == doctest::Approx(truth.ic[j]).epsilon(0.01));

    std::vector<spectroscopy_sample> one(data.begin(), data.begin() + 4);
    CHECK_THROWS_AS(fit_circuit(start, one, opt), data_error);
  }
}
