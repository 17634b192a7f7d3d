#include <doctest.h>

#include <cmath>

#include "tcq/calibration.hpp"
#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

using namespace tcq;

namespace {

crosstalk_map reference_map() {
  crosstalk_map m;
  m.w << 1.0e-3, 0.15e-3, 0.25e-3, 1.2e-3;
  m.i0 << 0.3e-3, -0.2e-3;
  return m;
}

double offset_error(const crosstalk_map& truth, const Eigen::Vector2d& i0) {
  Eigen::Vector2d d = truth.w.inverse() * (i0 - truth.i0);
  d -= d.array().round().matrix();
  return d.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("current and flux maps invert each other") {
    const auto m = reference_map();
    const flux_bias f{0.37, 0.61};
    const auto i = fluxes_to_currents(m, f);
    const auto g = currents_to_fluxes(m, i[0], i[1]);
    CHECK(g.f_beta == doctest::Approx(f.f_beta).epsilon(1e-14));
    CHECK(g.f_eps == doctest::Approx(f.f_eps).epsilon(1e-14));
    CHECK(fluxes_to_currents(m, {0.5, 0.5}).isApprox(m.i0));
    crosstalk_map s;
    s.w << 1, 2, 2, 4;
    CHECK_THROWS_AS(currents_to_fluxes(s, 0, 0), config_error);
  }

  TEST_CASE("surrogate model has the circuit symmetries") {
    const auto m = surrogate_model();
    for (double fb : {0.37, 0.52})
      for (double fe : {0.41, 0.73}) {
        const double w = m({fb, fe});
        CHECK(m({fb + 1, fe}) == doctest::Approx(w).epsilon(1e-12));
        CHECK(m({fb, fe + 1}) == doctest::Approx(w).epsilon(1e-12));
        CHECK(m({1 - fb, 1 - fe}) == doctest::Approx(w).epsilon(1e-12));
      }
  }

  TEST_CASE("synthesis is deterministic in the seed") {
    const auto ax = uniform_axis(-1.5e-3, 1.5e-3, 32);
    synthesis_options o;
    o.noise = 0.05;
    o.seed = 9;
    const auto a = synthesize_scan(surrogate_model(), reference_map(), 2 * constants::pi * 5e9, ax, ax, o);
    const auto b = synthesize_scan(surrogate_model(), reference_map(), 2 * constants::pi * 5e9, ax, ax, o);
    CHECK(a.values == b.values);
    o.seed = 10;
    const auto c = synthesize_scan(surrogate_model(), reference_map(), 2 * constants::pi * 5e9, ax, ax, o);
    CHECK(a.values != c.values);
  }

  TEST_CASE("noise-free scan gives the generating map") {
    const auto truth = reference_map();
    const auto ax = uniform_axis(-1.5e-3, 1.5e-3, 128);
    const auto scan = synthesize_scan(surrogate_model(), truth, 2 * constants::pi * 5e9, ax, ax);
    const auto lr = lattice_vectors(scan);
    for (int c = 0; c < 2; ++c) CHECK((lr.w.col(c) - truth.w.col(c)).norm() < 0.005 * truth.w.col(c).norm());
    const auto off = offsets(scan, lr.w);
    CHECK(offset_error(truth, off.i0) < 0.005);
    CHECK_FALSE(off.ambiguous);
  }

  TEST_CASE("axis assignment orders columns by current axis") {
    const auto truth = reference_map();
    const auto ax = uniform_axis(-1.5e-3, 1.5e-3, 96);
    const auto scan = synthesize_scan(surrogate_model(), truth, 2 * constants::pi * 5e9, ax, ax);
    lattice_options o;
    o.assignment = lattice_assignment::axis;
    const auto lr = lattice_vectors(scan, o);
    CHECK(std::abs(lr.w(0, 0)) > std::abs(lr.w(1, 0)));
    CHECK(std::abs(lr.w(1, 1)) > std::abs(lr.w(0, 1)));
  }

  TEST_CASE("scans shorter than two periods are rejected") {
    const auto ax = uniform_axis(-0.4e-3, 0.4e-3, 48);
    const auto scan = synthesize_scan(surrogate_model(), reference_map(), 2 * constants::pi * 5e9, ax, ax);
    CHECK_THROWS_AS(lattice_vectors(scan), periodicity_error);
  }

  TEST_CASE("non-uniform axes are rejected") {
    scan2d s;
    s.i_beta = {0, 1, 3, 4, 5, 6, 7, 8};
    s.i_eps = s.i_beta;
    s.values = Eigen::MatrixXd::Ones(8, 8);
    CHECK_THROWS_AS(s.validate(), data_error);
  }
}
