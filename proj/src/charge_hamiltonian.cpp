#include "tcq/hamiltonian.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tcq/constants.hpp"
#include "tcq/errors.hpp"

namespace tcq {

charge_basis::charge_basis(std::array<int, 4> c) : cutoff(c) {
  for (int j = 3; j >= 0; --j) {
    if (cutoff[j] < 1) throw config_error("charge cutoff must be at least 1");
    stride[j] = size;
    size *= 2 * cutoff[j] + 1;
  }
}

Eigen::Index charge_basis::index(const std::array<int, 4>& n) const {
  Eigen::Index i = 0;
  for (int j = 0; j < 4; ++j) i += (n[j] + cutoff[j]) * stride[j];
  return i;
}

std::array<int, 4> charge_basis::charges(Eigen::Index i) const {
  std::array<int, 4> n{};
  for (int j = 0; j < 4; ++j) {
    n[j] = static_cast<int>(i / stride[j]) - cutoff[j];
    i %= stride[j];
  }
  return n;
}

bool charge_basis::contains(const std::array<int, 4>& n) const {
  for (int j = 0; j < 4; ++j)
    if (n[j] < -cutoff[j] || n[j] > cutoff[j]) return false;
  return true;
}

Eigen::Matrix4d kinetic_matrix(const circuit_params& p) {
  const Eigen::Matrix4d cinv = coordinate_capacitance(p).inverse();
  // hbar^2 / (2 phi0^2) = 2 e^2
  return 2.0 * constants::e * constants::e * cinv / constants::energy_unit;
}

double charge_hamiltonian_bytes(const charge_basis& basis, bool renormalization) {
  const double per_row = 13.0 + (renormalization ? 2.0 * basis.cutoff[3] : 0.0);
  // value + column index per entry, row pointers, triplet staging
  return static_cast<double>(basis.size) * (per_row * (16.0 + 8.0) * 2.0 + 8.0);
}

sparse_cmat charge_hamiltonian(const circuit_params& p, const flux_bias& b, const charge_basis& basis) {
  const Eigen::Matrix4d kin = kinetic_matrix(p);
  const auto terms = junction_terms(p, b);
  const double kr = renormalization_strength(p) / constants::energy_unit;
  const int n5 = basis.cutoff[3];

  std::vector<Eigen::Triplet<std::complex<double>, std::int64_t>> trip;
  trip.reserve(static_cast<std::size_t>(basis.size) * (13 + (kr > 0 ? 2 * n5 : 0)));
  for (Eigen::Index i = 0; i < basis.size; ++i) {
    const auto n = basis.charges(i);
    const Eigen::Vector4d nv(n[0], n[1], n[2], n[3]);
    double diag = nv.dot(kin * nv);
    if (kr > 0) diag += kr * constants::pi * constants::pi / 3.0;
    trip.emplace_back(i, i, diag);
    // -ej/2 (e^{i phi} S_v + h.c.), S_v |n> = |n + v>
    for (const auto& t : terms) {
      const std::complex<double> amp = -0.5 * t.ej / constants::energy_unit * std::polar(1.0, t.phase);
      std::array<int, 4> up = n, dn = n;
      for (int j = 0; j < 4; ++j) {
        up[j] += t.shift[j];
        dn[j] -= t.shift[j];
      }
      if (basis.contains(up)) trip.emplace_back(basis.index(up), i, amp);
      if (basis.contains(dn)) trip.emplace_back(basis.index(dn), i, std::conj(amp));
    }
    if (kr > 0) {
      for (int m = -n5; m <= n5; ++m) {
        const int k = m - n[3];
        if (k == 0) continue;
        auto to = n;
        to[3] = m;
        trip.emplace_back(basis.index(to), i, kr * 2.0 * ((k % 2) ? -1.0 : 1.0) / (double(k) * k));
      }
    }
  }
  sparse_cmat h(basis.size, basis.size);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

}  // namespace tcq
