#pragma once

#include <memory>
#include <stdexcept>

#include "ocprec/sparse.hpp"

namespace ocprec {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves with a square matrix and its transpose.
class InnerSolver {
 public:
  virtual ~InnerSolver() = default;
  virtual Index size() const = 0;
  virtual Vector solve(const Vector& b) const = 0;
  virtual Vector solve_transpose(const Vector& b) const = 0;
};

// Sparse LU with COLAMD ordering. A pivot below pivot_tol * max|a_ij| is
// reported as singular.
class Factorization final : public InnerSolver {
 public:
  static constexpr double kPivotTolerance = 1e-13;

  explicit Factorization(const SparseMatrix& a, double pivot_tol = kPivotTolerance);
  ~Factorization() override;
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  Index size() const override { return n_; }
  Vector solve(const Vector& b) const override;
  Vector solve_transpose(const Vector& b) const override;

  // Smallest |u_kk| relative to max|a_ij|.
  double min_relative_pivot() const { return min_rel_pivot_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index n_ = 0;
  double min_rel_pivot_ = 0.0;
};

std::shared_ptr<Factorization> factorize(const SparseMatrix& a);
Vector solve(const Factorization& f, const Vector& b);
Vector solve_transpose(const Factorization& f, const Vector& b);

}  // namespace ocprec
