#pragma once

#include <array>
#include <memory>

#include "tcq/circuit.hpp"
#include "tcq/eigensolver.hpp"
#include "tcq/fft.hpp"

namespace tcq {

// product basis |n1 n2 n4 n5>, n_j in [-cutoff_j, cutoff_j], n1 slowest
struct charge_basis {
  explicit charge_basis(std::array<int, 4> cutoff);
  std::array<int, 4> cutoff;
  std::array<Eigen::Index, 4> stride{};
  Eigen::Index size = 1;

  Eigen::Index index(const std::array<int, 4>& n) const;
  std::array<int, 4> charges(Eigen::Index i) const;
  bool contains(const std::array<int, 4>& n) const;
};

// T(n) = n^T K n in units of constants::energy_unit
Eigen::Matrix4d kinetic_matrix(const circuit_params& p);

// bytes needed to store the sparse Hamiltonian
double charge_hamiltonian_bytes(const charge_basis& basis, bool renormalization);

// Hermitian charge-basis Hamiltonian in units of constants::energy_unit
sparse_cmat charge_hamiltonian(const circuit_params& p, const flux_bias& b, const charge_basis& basis);

// matrix-free Hamiltonian on a periodic grid of points^4 phases in [0, 2pi)
class grid_hamiltonian final : public hermitian_operator {
 public:
  grid_hamiltonian(const circuit_params& p, const flux_bias& b, int points);
  Eigen::Index dim() const override { return static_cast<Eigen::Index>(potential_.size()); }
  void apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const override;
  void precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const override;
  cmat initial_guess(int count) const override;
  int points() const { return points_; }
  const Eigen::VectorXd& potential() const { return potential_; }
  const Eigen::VectorXd& kinetic() const { return kinetic_; }

 private:
  int points_;
  Eigen::VectorXd potential_;  // per grid point
  Eigen::VectorXd kinetic_;    // per Fourier index
  double mean_potential_ = 0.0;
  std::shared_ptr<fft_plan> fft_;
};

double grid_phase(int j, int points);
// signed frequency of FFT index k
int fft_frequency(int k, int points);

// unitary maps between charge coefficients and grid samples (exact when 2 cutoff + 1 <= points)
cvec charge_to_grid(const charge_basis& basis, const Eigen::Ref<const cvec>& c, int points);
cvec grid_to_charge(const charge_basis& basis, const Eigen::Ref<const cvec>& psi, int points);

}  // namespace tcq
