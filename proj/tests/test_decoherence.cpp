#include <doctest.h>

#include <cmath>

#include "tcq/constants.hpp"
#include "tcq/decoherence.hpp"
#include "tcq/errors.hpp"

using namespace tcq;

namespace {
constexpr double two_pi = 2.0 * constants::pi;
}

TEST_SUITE("decoherence") {
  TEST_CASE("transmission-line dephasing") {
    const double expect = 2 * constants::k_b * 0.05 * constants::phi0 * constants::phi0 /
                          (constants::hbar * constants::hbar * 50.0) * 0.02 * 0.02;
    CHECK(dephasing_tl(0.02, 0.05, 50.0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(dephasing_tl(0.02, 0.10, 50.0) == doctest::Approx(2 * expect).epsilon(1e-14));
    CHECK(dephasing_tl(0.0, 0.05, 50.0) == 0.0);
  }

  TEST_CASE("1/f dephasing") {
    noise_model n;
    const flux_slopes s{two_pi * 1e10, two_pi * 2e9};
    const double l = std::log(n.f_uv / n.f_ir);
    const double expect = s.d_eps * std::sqrt(n.a_eps * l) + s.d_beta * std::sqrt(n.a_beta * l);
    CHECK(dephasing_flux_1f(s, n) == doctest::Approx(expect).epsilon(1e-14));
    n.a_eps = n.a_beta = 0;
    CHECK(dephasing_flux_1f(s, n) == 0.0);
  }

  TEST_CASE("Johnson noise conventions") {
    const double w = two_pi * 5e9;
    const double cl = johnson_current_noise(w, 0.3, 50.0, johnson_convention::classical);
    CHECK(cl == doctest::Approx(2 * constants::k_b * 0.3 / 50.0).epsilon(1e-14));
    // the quantum form approaches the classical one when kT >> hbar w
    const double q_hot = johnson_current_noise(w, 300.0, 50.0, johnson_convention::quantum);
    CHECK(q_hot == doctest::Approx(johnson_current_noise(w, 300.0, 50.0, johnson_convention::classical)).epsilon(1e-3));
    // and tends to 2 hbar w / Z at zero temperature
    CHECK(johnson_current_noise(w, 1e-6, 50.0, johnson_convention::quantum) ==
          doctest::Approx(2 * constants::hbar * w / 50.0).epsilon(1e-12));
  }

  TEST_CASE("relaxation channel scalings") {
    noise_model n;
    const std::complex<double> de(2e-22, 0), db(5e-23, 1e-23);
    const double w = two_pi * 5.7e9;
    const double g = relaxation_bias_lines(de, db, n, w);
    n.m_eps *= 2;
    n.m_beta *= 2;
    CHECK(relaxation_bias_lines(de, db, n, w) == doctest::Approx(4 * g).epsilon(1e-13));
    n = {};
    const double f = relaxation_flux_1f(de, db, n, w);
    CHECK(relaxation_flux_1f(de, db, n, 2 * w) == doctest::Approx(f / 2).epsilon(1e-13));
    n.a_eps = n.a_beta = 0;
    CHECK(relaxation_flux_1f(de, db, n, w) == 0.0);

    n = {};
    std::array<std::complex<double>, 6> sh{};
    sh[1] = 0.6;
    const std::array<double, 6> ej{1e-23, 2e-23, 1e-23, 3e-23, 3e-23, 1e-23};
    const double qp = relaxation_quasiparticle(sh, n, w, ej);
    const double expect = 0.36 * 8 * n.x_qp * ej[1] / (constants::hbar * constants::pi) *
                          std::sqrt(2 * n.delta_al / (constants::hbar * w));
    CHECK(qp == doctest::Approx(expect).epsilon(1e-13));
    n.x_qp *= 3;
    CHECK(relaxation_quasiparticle(sh, n, w, ej) == doctest::Approx(3 * qp).epsilon(1e-13));
    n.x_qp = 0;
    CHECK(relaxation_quasiparticle(sh, n, w, ej) == 0.0);
  }

  TEST_CASE("noise model validation") {
    noise_model n;
    n.x_qp = -1;
    CHECK_THROWS_AS(n.validate(), config_error);
    n = {};
    n.f_uv = 0.5;
    CHECK_THROWS_AS(n.validate(), config_error);
  }

  TEST_CASE("budget bookkeeping") {
    const auto p = default_circuit();
    const auto cfg = solver_config::uniform(3);
    const auto sp = symmetry_point(p, 0.42, cfg);
    const line_params tl{p.z0, p.l0, p.c0};
    noise_model n;
    const auto b = budget(p, sp.state, n, tl, 0.05, cfg);
    CHECK(b.gamma_phi == doctest::Approx(b.gamma_phi_tl + b.gamma_phi_1f).epsilon(1e-15));
    CHECK(b.gamma10_nr ==
          doctest::Approx(b.gamma10_bias + b.gamma10_1f + b.gamma10_qp + b.gamma10_residual).epsilon(1e-15));
    CHECK(b.gamma10 >= b.gamma1 + b.gamma10_nr);
    CHECK(b.gamma01 / b.gamma10 == doctest::Approx(std::exp(-constants::hbar * b.omega01 / (constants::k_b * b.t_eff))).epsilon(1e-9));

    // only the line left: the budget's dephasing is the line term alone and t_eff is the line temperature
    noise_model quiet;
    quiet.a_eps = quiet.a_beta = 0;
    quiet.m_eps = quiet.m_beta = 0;
    quiet.x_qp = 0;
    const auto q = budget(p, sp.state, quiet, tl, 0.05, cfg);
    const auto me = matrix_elements(p, sp.state);
    CHECK(q.gamma_phi == doctest::Approx(dephasing_tl(me.gamma5_diag_diff, 0.05, p.z0)).epsilon(1e-12));
    CHECK(q.gamma10_nr == 0.0);
    CHECK(q.t_eff == doctest::Approx(0.05).epsilon(1e-12));
  }
}
