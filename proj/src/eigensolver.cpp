#include "tcq/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "tcq/errors.hpp"

namespace tcq {

namespace {

double guarded(double d, double shift) {
  const double guard = 1e-6 * (1.0 + std::abs(shift));
  if (std::abs(d) < guard) return d < 0 ? -guard : guard;
  return d;
}

void diagonal_precondition(const Eigen::VectorXd& diag, const Eigen::Ref<const cvec>& r,
                           double shift, Eigen::Ref<cvec> out) {
  for (Eigen::Index i = 0; i < r.size(); ++i) out[i] = r[i] / guarded(diag[i] - shift, shift);
}

cmat unit_vectors_at_smallest(const Eigen::VectorXd& diag, int count) {
  std::vector<Eigen::Index> idx(diag.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto c = std::min<Eigen::Index>(count, diag.size());
  std::partial_sort(idx.begin(), idx.begin() + c, idx.end(), [&](auto a, auto b) {
    return diag[a] < diag[b] || (diag[a] == diag[b] && a < b);
  });
  cmat x = cmat::Zero(diag.size(), count);
  for (Eigen::Index j = 0; j < c; ++j) x(idx[j], j) = 1.0;
  // small deterministic admixture breaks exact degeneracies between unit vectors
  cmat noise = random_vectors(diag.size(), count, 0x9e3779b9);
  x += 1e-3 * noise;
  return x;
}

// orthonormalise columns of w against v(:, :m) and each other; returns the kept count
int orthonormalize_block(const cmat& v, Eigen::Index m, cmat& w, std::uint64_t& seed) {
  Eigen::VectorXd before = w.colwise().norm();
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if (!(before[j] > 0.0) || !std::isfinite(before[j])) {
      w.col(j) = random_vectors(w.rows(), 1, seed++).col(0);
      before[j] = 1.0;
    }
  }
  if (m > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      const cmat c = v.leftCols(m).adjoint() * w;
      w.noalias() -= v.leftCols(m) * c;
    }
  }
  int kept = 0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    cvec t = w.col(j);
    for (int attempt = 0; attempt < 3; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        if (kept > 0) t -= w.leftCols(kept) * (w.leftCols(kept).adjoint() * t);
        if (attempt > 0 && m > 0) t -= v.leftCols(m) * (v.leftCols(m).adjoint() * t);
      }
      const double after = t.norm();
      if (after > 1e-8 * before[j]) {
        w.col(kept++) = t / after;
        break;
      }
      t = random_vectors(t.size(), 1, seed++).col(0);
      before[j] = 1.0;
    }
  }
  return kept;
}

eigen_result dense_solve(const hermitian_operator& op, int k) {
  cmat h = op.dense();
  const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw error("operator is not Hermitian (max |H - H^+| = " + std::to_string(herm) + ")");
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<cmat> es(h);
  if (es.info() != Eigen::Success) throw convergence_error("dense eigensolver failed");
  eigen_result out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  out.residuals.resize(k);
  const double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  for (int i = 0; i < k; ++i) {
    const double r = (h * out.vectors.col(i) - out.values[i] * out.vectors.col(i)).norm();
    out.residuals[i] = r / std::max({std::abs(out.values[i]), spread, 1e-300});
  }
  out.dense = true;
  return out;
}

}  // namespace

cmat random_vectors(Eigen::Index n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  cmat x(n, count);
  for (int j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = {g(rng), g(rng)};
    x.col(j).normalize();
  }
  return x;
}

void hermitian_operator::precondition(const Eigen::Ref<const cvec>& r, double, Eigen::Ref<cvec> out) const {
  out = r;
}

cmat hermitian_operator::initial_guess(int count) const { return random_vectors(dim(), count, 7); }

cmat hermitian_operator::dense() const {
  const auto n = dim();
  cmat h(n, n);
  constexpr Eigen::Index chunk = 256;
  for (Eigen::Index j = 0; j < n; j += chunk) {
    const auto c = std::min(chunk, n - j);
    cmat e = cmat::Zero(n, c);
    for (Eigen::Index i = 0; i < c; ++i) e(j + i, i) = 1.0;
    apply(e, h.middleCols(j, c));
  }
  return h;
}

dense_operator::dense_operator(cmat h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols()) throw error("dense operator must be square");
}

void dense_operator::apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const { y.noalias() = h_ * x; }

void dense_operator::precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const {
  diagonal_precondition(h_.diagonal().real(), r, shift, out);
}

cmat dense_operator::initial_guess(int count) const {
  return unit_vectors_at_smallest(h_.diagonal().real(), count);
}

sparse_operator::sparse_operator(sparse_cmat h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols()) throw error("sparse operator must be square");
  h_.makeCompressed();
  diag_ = h_.diagonal().real();
}

void sparse_operator::apply(const Eigen::Ref<const cmat>& x, Eigen::Ref<cmat> y) const { y.noalias() = h_ * x; }

void sparse_operator::precondition(const Eigen::Ref<const cvec>& r, double shift, Eigen::Ref<cvec> out) const {
  diagonal_precondition(diag_, r, shift, out);
}

cmat sparse_operator::initial_guess(int count) const { return unit_vectors_at_smallest(diag_, count); }

eigen_result lowest_eigenpairs(const hermitian_operator& op, int k, const eigen_options& opt, const cmat* guess) {
  const Eigen::Index n = op.dim();
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "requested " << k << " eigenpairs from an operator of dimension " << n;
    throw config_error(os.str());
  }
  if (!opt.force_iterative && n <= opt.dense_threshold) return dense_solve(op, k);

  Eigen::Index m_max = opt.max_subspace > 0 ? opt.max_subspace : std::max(6 * k, 24);
  m_max = std::min<Eigen::Index>(std::max<Eigen::Index>(m_max, 2 * k + 1), n);
  const Eigen::Index keep = std::max<Eigen::Index>(k + 1, m_max / 2);

  cmat v(n, m_max), av(n, m_max);
  cmat g = cmat::Zero(m_max, m_max);
  Eigen::Index m = 0;
  std::uint64_t seed = opt.seed;

  auto append = [&](cmat& w) {
    const int kept = orthonormalize_block(v, m, w, seed);
    if (kept == 0) return 0;
    const auto cols = std::min<Eigen::Index>(kept, m_max - m);
    v.middleCols(m, cols) = w.leftCols(cols);
    op.apply(v.middleCols(m, cols), av.middleCols(m, cols));
    g.block(0, m, m + cols, cols) = v.leftCols(m + cols).adjoint() * av.middleCols(m, cols);
    g.block(m, 0, cols, m) = g.block(0, m, m, cols).adjoint();
    m += cols;
    return static_cast<int>(cols);
  };

  {
    cmat w = op.initial_guess(k);
    if (guess && guess->rows() == n && guess->cols() > 0) {
      const auto gc = std::min<Eigen::Index>(guess->cols(), k);
      w.leftCols(gc) = guess->leftCols(gc);
    }
    append(w);
  }

  eigen_result out;
  cvec t(n);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    cmat gm = 0.5 * (g.topLeftCorner(m, m) + g.topLeftCorner(m, m).adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> es(gm);
    const Eigen::VectorXd theta = es.eigenvalues();
    const cmat& y = es.eigenvectors();
    const int nr = static_cast<int>(std::min<Eigen::Index>(k, m));
    cmat x = v.leftCols(m) * y.leftCols(nr);
    cmat r = av.leftCols(m) * y.leftCols(nr) - x * theta.head(nr).asDiagonal();
    const double spread = theta.maxCoeff() - theta.minCoeff();
    Eigen::VectorXd rel(nr);
    std::vector<int> open;
    for (int i = 0; i < nr; ++i) {
      rel[i] = r.col(i).norm() / std::max({std::abs(theta[i]), spread, 1e-300});
      if (!(rel[i] <= opt.tolerance)) open.push_back(i);
    }
    if (open.empty() && nr == k) {
      out.values = theta.head(k);
      out.vectors = std::move(x);
      for (int i = 0; i < k; ++i) out.vectors.col(i).normalize();
      out.residuals = rel;
      out.iterations = it;
      return out;
    }
    if (it == opt.max_iterations) {
      std::ostringstream os;
      os << "eigensolver did not converge in " << opt.max_iterations
         << " iterations; largest relative residual " << rel.maxCoeff();
      throw convergence_error(os.str());
    }
    if (m + static_cast<Eigen::Index>(open.size()) > m_max) {
      const auto kk = std::min(keep, m);
      cmat vy = v.leftCols(m) * y.leftCols(kk);
      cmat avy = av.leftCols(m) * y.leftCols(kk);
      v.leftCols(kk) = vy;
      av.leftCols(kk) = avy;
      g.setZero();
      for (Eigen::Index i = 0; i < kk; ++i) g(i, i) = theta[i];
      m = kk;
    }
    cmat w(n, open.size());
    for (std::size_t j = 0; j < open.size(); ++j) {
      const int i = open[j];
      op.precondition(r.col(i), theta[i], t);
      w.col(j) = t;
    }
    if (append(w) == 0) {
      // stagnated: widen with a random direction
      cmat extra = random_vectors(n, 1, seed++);
      append(extra);
    }
  }
  throw convergence_error("eigensolver exhausted its iteration budget");
}

}  // namespace tcq
