#include <doctest.h>

#include <cmath>

#include "tcq/constants.hpp"
#include "tcq/coupling.hpp"
#include "tcq/errors.hpp"
#include "tcq/reflections.hpp"

using namespace tcq;

namespace {
constexpr double two_pi = 2.0 * constants::pi;
constexpr double v = 1.19e8;
}  // namespace

TEST_SUITE("reflections") {
  TEST_CASE("VSWR to reflection magnitude") {
    CHECK(vswr_to_reflection(1.0) == 0.0);
    CHECK(vswr_to_reflection(4.0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(vswr_to_reflection(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(vswr_to_reflection(0.5), config_error);
  }

  TEST_CASE("filter validation") {
    auto f = filter_model::from_vswr(3.0, 0.2, v);
    CHECK_NOTHROW(f.validate());
    f.s12 *= 0.9;
    f.s21 *= 0.9;
    CHECK_THROWS_AS(f.validate(), config_error);
  }

  TEST_CASE("shifted scattering moves port 1 only") {
    const auto f = filter_model::from_vswr(2.0, 0.2, v);
    const double w = two_pi * 5e9, d = 0.37;
    const auto s = shifted_scattering(f, w, d);
    const auto ph = std::polar(1.0, -w * d / v);
    CHECK(std::abs(s(0, 0) - ph * ph * f.s11) < 1e-15);
    CHECK(std::abs(s(0, 1) - ph * f.s12) < 1e-15);
    CHECK(std::abs(s(1, 1) - f.s22) < 1e-15);
    CHECK((s.adjoint() * s - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
  }

  TEST_CASE("mode spectrum") {
    const double d = 1.3;
    const auto ideal = mode_spectrum(filter_model::from_vswr(1.0, 0.2, v), d);
    CHECK(ideal.theta[0] == 0.0);
    const auto f = filter_model::from_vswr(2.5, 0.2, v);
    const auto m = mode_spectrum(f, d);
    CHECK(m.residual < 1e-10);
    // both roots of the quadratic in exp(-i phi): phases mirror each other for this filter
    CHECK(m.theta[0] + m.theta[1] == doctest::Approx(two_pi).epsilon(1e-12));
    // the lattice extension hits roots too
    for (int s = 0; s < 2; ++s) {
      const auto sw = shifted_scattering(f, m.omega(s, 7), d);
      CHECK(std::abs(sw(0, 0) * sw(1, 1) - (sw(0, 1) - 1.0) * (sw(1, 0) - 1.0)) < 1e-9);
    }
    // one mode per parity per free spectral range, independent of the reflection
    const double lo = two_pi * 4e9, hi = two_pi * 6e9;
    const double expect = (hi - lo) * d / (two_pi * v);
    for (int s = 0; s < 2; ++s) CHECK(std::abs(double(m.omegas(s, lo, hi).size()) - expect) <= 1.0);
    // small perturbations move theta continuously
    const auto m2 = mode_spectrum(filter_model::from_vswr(2.5001, 0.2, v), d);
    CHECK(std::abs(m2.theta[0] - m.theta[0]) < 1e-3);
  }

  TEST_CASE("parity reflection") {
    const double d = 0.8;
    const auto f0 = filter_model::from_vswr(1.0, 0.2, v);
    const auto r0 = parity_reflection(f0, mode_spectrum(f0, d));
    CHECK(std::abs(r0[0]) == 0.0);
    const auto f = filter_model::from_vswr(3.0, 0.2, v);
    const auto m = mode_spectrum(f, d);
    const auto a = parity_reflection(f, m, 0), b = parity_reflection(f, m, 5);
    for (int s = 0; s < 2; ++s) {
      CHECK(std::abs(a[s] - b[s]) < 1e-12);
      CHECK(std::abs(a[s]) <= 1.0 + 1e-12);
      // the closed form is unimodular for a lossless reciprocal filter
      CHECK(std::abs(a[s]) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("relaxation with reflection") {
    const line_params tl = line_params::from_impedance(50.0, v);
    const std::complex<double> g(0.04, 0.01);
    const double zq = 0.2;
    for (double w : {two_pi * 3e9, two_pi * 5.7e9, two_pi * 8.1e9}) {
      CHECK(relaxation_with_reflection(g, w, 0.0, 0.0, zq, v, 50.0) ==
            doctest::Approx(radiative_rate(g, w, tl)).epsilon(1e-12));
    }
    const auto r = vswr_parity_reflections(4.0);
    const double w0 = two_pi * 5e9, period = constants::pi * v / zq;
    double lo = 1e300, hi = 0, mean = 0;
    const int n = 2000;
    for (int k = 0; k < n; ++k) {
      const double w = w0 + period * k / n;
      const double ratio = relaxation_with_reflection(g, w, r[0], r[1], zq, v, 50.0) / radiative_rate(g, w, tl);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      mean += ratio / n;
    }
    CHECK(lo == doctest::Approx(0.16 / 1.36).epsilon(1e-4));
    CHECK(hi == doctest::Approx(2.56 / 1.36).epsilon(1e-4));
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-3));
    // opposite parity phases cancel the standing wave
    const auto flat = vswr_parity_reflections(4.0, constants::pi);
    CHECK(relaxation_with_reflection(g, w0 + 0.3 * period, flat[0], flat[1], zq, v, 50.0) ==
          doctest::Approx(radiative_rate(g, w0 + 0.3 * period, tl)).epsilon(1e-12));
  }
}
