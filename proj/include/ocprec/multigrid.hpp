#pragma once

#include <memory>
#include <vector>

#include "ocprec/factorization.hpp"
#include "ocprec/schur.hpp"

namespace ocprec {

// Trilinear interpolation from the level-(p-1) interior grid to level p.
SparseMatrix prolongation(int p);

// One V-cycle with damped Jacobi smoothing and Galerkin coarse operators,
// direct solve at level 1. solve_transpose applies the exact adjoint of the
// cycle, so solve_transpose(M solve(.)) stays symmetric.
class MultigridSolver final : public InnerSolver {
 public:
  MultigridSolver(const SparseMatrix& a, int level, const InnerSolverPolicy& policy);

  Index size() const override { return levels_.front().a.rows(); }
  Vector solve(const Vector& b) const override;
  Vector solve_transpose(const Vector& b) const override;
  int depth() const { return static_cast<int>(levels_.size()); }

 private:
  struct Level {
    SparseMatrix a;
    SparseMatrix at;
    Vector inv_diag;
    SparseMatrix p;   // to this level from the next coarser one
    SparseMatrix pt;
  };
  Vector cycle(std::size_t l, const Vector& b) const;
  Vector cycle_adjoint(std::size_t l, const Vector& g) const;

  std::vector<Level> levels_;
  std::unique_ptr<Factorization> coarse_;
  int pre_, post_;
  double omega_;
};

}  // namespace ocprec
