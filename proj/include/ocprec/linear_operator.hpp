#pragma once

#include <functional>
#include <memory>

#include "ocprec/sparse.hpp"

namespace ocprec {

// Matrix-free y = A x with fixed dimensions.
class LinearOperator {
 public:
  using Apply = std::function<void(const Vector& x, Vector& y)>;

  LinearOperator() = default;
  LinearOperator(Index rows, Index cols, Apply apply, Apply apply_transpose = {})
      : rows_(rows), cols_(cols), apply_(std::move(apply)), apply_t_(std::move(apply_transpose)) {}

  static LinearOperator identity(Index n) {
    auto copy = [](const Vector& x, Vector& y) { y = x; };
    return LinearOperator(n, n, copy, copy);
  }

  static LinearOperator from_matrix(SparseMatrix a) {
    auto m = std::make_shared<const SparseMatrix>(std::move(a));
    return LinearOperator(
        m->rows(), m->cols(), [m](const Vector& x, Vector& y) { y = m->multiply(x); },
        [m](const Vector& x, Vector& y) { y = m->multiply_transpose(x); });
  }

  static LinearOperator from_dense(DenseMatrix a) {
    auto m = std::make_shared<const DenseMatrix>(std::move(a));
    return LinearOperator(
        m->rows(), m->cols(), [m](const Vector& x, Vector& y) { y.noalias() = (*m) * x; },
        [m](const Vector& x, Vector& y) { y.noalias() = m->transpose() * x; });
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool has_transpose() const { return static_cast<bool>(apply_t_); }

  Vector apply(const Vector& x) const {
    if (x.size() != cols_) throw DimensionError("operator input length mismatch");
    Vector y(rows_);
    apply_(x, y);
    return y;
  }

  Vector apply_transpose(const Vector& x) const {
    if (!apply_t_) throw std::logic_error("operator has no transpose action");
    if (x.size() != rows_) throw DimensionError("operator input length mismatch");
    Vector y(cols_);
    apply_t_(x, y);
    return y;
  }

  Vector operator()(const Vector& x) const { return apply(x); }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Apply apply_;
  Apply apply_t_;
};

// Dense matrix of an operator, column by column. Desk scale only.
inline DenseMatrix to_dense(const LinearOperator& op) {
  DenseMatrix a(op.rows(), op.cols());
  Vector e = Vector::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    a.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return a;
}

}  // namespace ocprec
