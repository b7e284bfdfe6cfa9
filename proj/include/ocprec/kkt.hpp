#pragma once

#include <vector>

#include "ocprec/grid.hpp"
#include "ocprec/linear_operator.hpp"

namespace ocprec {

struct KktPoint {
  Vector y, u, p, mu;

  static KktPoint zeros(Index n) {
    return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  }
  Index n() const { return y.size(); }
};

struct ActiveSet {
  Index n = 0;
  std::vector<Index> upper;     // A^b
  std::vector<Index> lower;     // A^a
  std::vector<Index> inactive;  // I
  std::vector<Index> active;    // A^b u A^a, sorted; row order of P_A
  std::vector<Index> position;  // position[i] = slot of i in `active`, or -1

  Index n_active() const { return static_cast<Index>(active.size()); }
  bool is_active(Index i) const { return position[i] >= 0; }
  // Diagonal of Pi = P_A' P_A.
  Vector pi_diagonal() const;

  static ActiveSet from_indices(Index n, std::vector<Index> upper, std::vector<Index> lower);
  static ActiveSet empty(Index n) { return from_indices(n, {}, {}); }
  static ActiveSet full(Index n);

  bool operator==(const ActiveSet& o) const { return n == o.n && upper == o.upper && lower == o.lower; }
};

// Scatter/gather between length-n vectors and the active slots.
Vector gather_active(const ActiveSet& s, const Vector& v);
Vector scatter_active(const ActiveSet& s, const Vector& va);

struct ComplementarityData {
  const Vector& a;
  const Vector& b;
  const std::vector<char>& has_lower;
  const std::vector<char>& has_upper;
  double alpha_u;
  double alpha_y;
  double c;
};

Vector complementarity(const Vector& u, const Vector& y, const Vector& mu, const ComplementarityData& data);

ActiveSet active_sets(const KktPoint& x, const DiscreteProblem& problem, double c);
inline ActiveSet active_sets(const KktPoint& x, const DiscreteProblem& problem) {
  return active_sets(x, problem, problem.spec.c);
}

Vector kkt_residual(const KktPoint& x, const DiscreteProblem& problem, double c);
inline Vector kkt_residual(const KktPoint& x, const DiscreteProblem& problem) {
  return kkt_residual(x, problem, problem.spec.c);
}

// Reduced Newton system for unknowns (y, u, p, mu_A).
class NewtonSystem {
 public:
  NewtonSystem(const DiscreteProblem& problem, ActiveSet active);

  const DiscreteProblem& problem() const { return *problem_; }
  const ActiveSet& active() const { return active_; }
  Index n() const { return active_.n; }
  Index dim() const { return 3 * n() + active_.n_active(); }
  const Vector& rhs() const { return rhs_; }

  Vector apply(const Vector& x) const;
  // J is symmetric for every L, so the adjoint action is apply itself.
  Vector apply_adjoint(const Vector& x) const { return apply(x); }
  LinearOperator as_operator() const;
  SparseMatrix assemble() const;

 private:
  const DiscreteProblem* problem_;
  ActiveSet active_;
  SparseMatrix Lt_;
  Vector rhs_;
};

NewtonSystem assemble_newton_system(const ActiveSet& active, const DiscreteProblem& problem);

KktPoint expand_solution(const Vector& x_reduced, const ActiveSet& active);
Vector reduce_point(const KktPoint& x, const ActiveSet& active);

}  // namespace ocprec
