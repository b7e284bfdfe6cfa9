#include "ocprec/factorization.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace ocprec {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using EigenLU = Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<Index>>;

struct Factorization::Impl {
  mutable EigenLU lu;  // transpose() is a non-const member in Eigen
};

Factorization::Factorization(const SparseMatrix& a, double pivot_tol) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw DimensionError("factorize needs a square matrix");
  n_ = a.rows();
  double amax = 0.0;
  for (Index i = 0; i < n_; ++i) {
    double rmax = 0.0;
    for (Index k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      rmax = std::max(rmax, std::abs(a.values()[k]));
    if (rmax == 0.0) throw SingularMatrixError("singular matrix: row " + std::to_string(i) + " is zero");
    amax = std::max(amax, rmax);
  }
  if (n_ == 0) return;

  EigenSparse e = a.to_eigen();
  auto& lu = impl_->lu;
  lu.isSymmetric(false);
  lu.analyzePattern(e);
  lu.factorize(e);
  if (lu.info() != Eigen::Success) throw SingularMatrixError("singular matrix: " + lu.lastErrorMessage());

  // The diagonal of U lives in the diagonal blocks of L's supernodes.
  const auto& mapL = lu.matrixL().m_mapL;
  double min_piv = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n_; ++j) {
    double piv = 0.0;
    for (typename std::decay_t<decltype(mapL)>::InnerIterator it(mapL, j); it; ++it) {
      if (it.row() == j) {
        piv = std::abs(it.value());
        break;
      }
    }
    min_piv = std::min(min_piv, piv);
  }
  min_rel_pivot_ = min_piv / amax;
  if (!(min_rel_pivot_ > pivot_tol))
    throw SingularMatrixError("singular matrix: relative pivot " + std::to_string(min_rel_pivot_));
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Vector Factorization::solve(const Vector& b) const {
  if (b.size() != n_) throw DimensionError("solve rhs length mismatch");
  if (n_ == 0) return b;
  Vector x = impl_->lu.solve(b);
  return x;
}

Vector Factorization::solve_transpose(const Vector& b) const {
  if (b.size() != n_) throw DimensionError("solve rhs length mismatch");
  if (n_ == 0) return b;
  Vector x = impl_->lu.transpose().solve(b);
  return x;
}

std::shared_ptr<Factorization> factorize(const SparseMatrix& a) { return std::make_shared<Factorization>(a); }
Vector solve(const Factorization& f, const Vector& b) { return f.solve(b); }
Vector solve_transpose(const Factorization& f, const Vector& b) { return f.solve_transpose(b); }

}  // namespace ocprec
