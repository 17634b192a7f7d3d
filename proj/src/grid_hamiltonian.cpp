#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"
#include "tcq/hamiltonian.hpp"

namespace tcq {

double grid_phase(int j, int points) { return 2.0 * constants::pi * j / points; }

int fft_frequency(int k, int points) { return k < points / 2 ? k : k - points; }

namespace {
double wrap_pi(double x) {
  x = std::fmod(x + constants::pi, 2.0 * constants::pi);
  if (x < 0) x += 2.0 * constants::pi;
  return x - constants::pi;
}
}  // namespace

grid_hamiltonian::grid_hamiltonian(const circuit_params& p, const flux_bias& b, int points) : points_(points) {
  if (points < 4 || (points & (points - 1)) != 0) throw config_error("grid points must be a power of two >= 4");
  const Eigen::Index g = points;
  const Eigen::Index total = g * g * g * g;
  potential_.resize(total);
  kinetic_.resize(total);
  const auto terms = junction_terms(p, b);
  const double kr = renormalization_strength(p) / constants::energy_unit;
  const Eigen::Matrix4d kin = kinetic_matrix(p);
  Eigen::Index idx = 0;
  for (int a = 0; a < points; ++a)
    for (int c = 0; c < points; ++c)
      for (int d = 0; d < points; ++d)
        for (int e = 0; e < points; ++e, ++idx) {
          const std::array<double, 4> ph{grid_phase(a, points), grid_phase(c, points), grid_phase(d, points),
                                         grid_phase(e, points)};
          double v = 0.0;
          for (const auto& t : terms) {
            double arg = t.phase;
            for (int j = 0; j < 4; ++j) arg += t.shift[j] * ph[j];
            v -= t.ej / constants::energy_unit * std::cos(arg);
          }
          if (kr > 0) {
            const double w = wrap_pi(ph[3]);
            v += kr * w * w;
          }
          potential_[idx] = v;
          const Eigen::Vector4d n(fft_frequency(a, points), fft_frequency(c, points), fft_frequency(d, points),
                                  fft_frequency(e, points));
          kinetic_[idx] = n.dot(kin * n);
        }
  mean_potential_ = potential_.mean();
  fft_ = std::make_shared<fft_plan>(std::vector<int>{points, points, points, points});
}

void grid_hamiltonian::apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const {
  const double inv = 1.0 / static_cast<double>(dim());
  cvec buf(dim());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    buf = x.col(c);
    fft_->forward(buf.data());
    buf.array() *= kinetic_.array() * inv;
    fft_->backward(buf.data());
    y.col(c) = buf + (potential_.array() * x.col(c).array()).matrix();
  }
}

void grid_hamiltonian::precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const {
  const double inv = 1.0 / static_cast<double>(dim());
  const double guard = 1e-6 * (1.0 + std::abs(shift));
  out = r;
  fft_->forward(out.data());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    double d = kinetic_[i] + mean_potential_ - shift;
    if (std::abs(d) < guard) d = d < 0 ? -guard : guard;
    out[i] *= inv / d;
  }
  fft_->backward(out.data());
}

cmat grid_hamiltonian::initial_guess(int count) const {
  std::vector<Eigen::Index> idx(dim());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(),
                    [&](auto a, auto b) { return potential_[a] < potential_[b] || (potential_[a] == potential_[b] && a < b); });
  cmat x = 1e-3 * random_vectors(dim(), count, 0x51ed);
  for (int j = 0; j < count; ++j) x(idx[j], j) += 1.0;
  return x;
}

cvec charge_to_grid(const charge_basis& basis, const Eigen::Ref<const cvec>& c, int points) {
  for (int j = 0; j < 4; ++j)
    if (2 * basis.cutoff[j] + 1 > points) throw config_error("phase grid too coarse for the charge cutoff");
  const Eigen::Index g = points;
  cvec psi = cvec::Zero(g * g * g * g);
  for (Eigen::Index i = 0; i < basis.size; ++i) {
    const auto n = basis.charges(i);
    Eigen::Index k = 0;
    for (int j = 0; j < 4; ++j) k = k * g + ((n[j] % points) + points) % points;
    psi[k] = c[i];
  }
  fft_plan plan({points, points, points, points});
  plan.backward(psi.data());
  psi /= std::sqrt(static_cast<double>(psi.size()));
  return psi;
}

cvec grid_to_charge(const charge_basis& basis, const Eigen::Ref<const cvec>& psi, int points) {
  const Eigen::Index g = points;
  if (psi.size() != g * g * g * g) throw error("grid state has the wrong size");
  cvec buf = psi;
  fft_plan plan({points, points, points, points});
  plan.forward(buf.data());
  buf /= std::sqrt(static_cast<double>(buf.size()));
  cvec c(basis.size);
  for (Eigen::Index i = 0; i < basis.size; ++i) {
    const auto n = basis.charges(i);
    Eigen::Index k = 0;
    for (int j = 0; j < 4; ++j) k = k * g + ((n[j] % points) + points) % points;
    c[i] = buf[k];
  }
  return c;
}

}  // namespace tcq
