#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tcq {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

class hermitian_operator {
 public:
  virtual ~hermitian_operator() = default;
  virtual Eigen::Index dim() const = 0;
  // y = H x, column by column; x and y have dim() rows
  virtual void apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const = 0;
  // approximate (H - shift)^-1 r; identity by default
  virtual void precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const;
  // deterministic start vectors
  virtual cmat initial_guess(int count) const;
  cmat dense() const;
};

class dense_operator final : public hermitian_operator {
 public:
  explicit dense_operator(cmat h);
  Eigen::Index dim() const override { return h_.rows(); }
  void apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const override;
  void precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const override;
  cmat initial_guess(int count) const override;
  const cmat& matrix() const { return h_; }

 private:
  cmat h_;
};

using sparse_cmat = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor, std::int64_t>;

class sparse_operator final : public hermitian_operator {
 public:
  explicit sparse_operator(sparse_cmat h);
  Eigen::Index dim() const override { return h_.rows(); }
  void apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const override;
  void precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const override;
  cmat initial_guess(int count) const override;
  const sparse_cmat& matrix() const { return h_; }
  const Eigen::VectorXd& diagonal() const { return diag_; }

 private:
  sparse_cmat h_;
  Eigen::VectorXd diag_;
};

struct eigen_options {
  double tolerance = 5e-9;  // residual norm relative to max(|E|, spectral spread)
  int max_iterations = 2000;
  int max_subspace = 0;      // 0 picks max(6k, 24)
  Eigen::Index dense_threshold = 400;
  bool force_iterative = false;
  std::uint64_t seed = 0x5eed;
};

struct eigen_result {
  Eigen::VectorXd values;
  cmat vectors;
  Eigen::VectorXd residuals;  // relative residual norms
  int iterations = 0;
  bool dense = false;
};

// lowest k eigenpairs, ascending; guess columns seed the search space
eigen_result lowest_eigenpairs(const hermitian_operator& op, int k, const eigen_options& opt = {},
                               const cmat* guess = nullptr);

// columns with unit norm, random phases, deterministic in seed
cmat random_vectors(Eigen::Index n, int count, std::uint64_t seed);

}  // namespace tcq
