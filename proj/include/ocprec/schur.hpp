#pragma once

#include <memory>
#include <utility>

#include "ocprec/factorization.hpp"
#include "ocprec/kkt.hpp"

namespace ocprec {

// How L1 and L1' systems are solved inside the Schur approximation.
struct InnerSolverPolicy {
  enum class Kind { Direct, Multigrid };
  Kind kind = Kind::Direct;
  int pre_smooth = 5;
  int post_smooth = 5;
  double damping = 2.0 / 3.0;
};

std::pair<double, double> gammas(double nu, double alpha_u, double alpha_y);

struct SchurFactor {
  double gamma1 = 0.0;
  double gamma2 = 1.0;
  double nu = 1.0;
  double nu_scale = 1.0;  // 1/nu
  double alpha_u = 1.0;
  double alpha_y = 0.0;
  double cprime = 1.0;  // alpha_y^2 nu + alpha_u^2
  SparseMatrix L1;
  std::shared_ptr<const InnerSolver> l1_solver;
  SparseMatrix coupling;  // E, n x n_A
  Vector trailing_diag;   // cprime / m_i on active slots
  Vector m;
  ActiveSet active;
  const DiscreteProblem* problem = nullptr;

  Index n() const { return active.n; }
  Index n_active() const { return active.n_active(); }
};

// sqrt(nu) L (I - g1 Pi)^{1/2} + (I - g2 Pi)^{1/2} M
SparseMatrix build_l1(const DiscreteProblem& problem, const ActiveSet& active);

SchurFactor build_schur_factor(const DiscreteProblem& problem, const ActiveSet& active,
                               const InnerSolverPolicy& policy = {});

Vector apply_shat_inverse(const SchurFactor& f, const Vector& r);

// Vectors are ordered (y, u, p, mu_A) as in NewtonSystem.
Vector apply_ipf_inverse(const SchurFactor& f, const Vector& r);
Vector apply_bdf_inverse(const SchurFactor& f, const Vector& r);

LinearOperator ipf_operator(std::shared_ptr<const SchurFactor> f);
LinearOperator bdf_operator(std::shared_ptr<const SchurFactor> f);

// Control-constrained system with mu_A eliminated and p negated:
//   K = [M 0 -L'; 0 nuM (I-Pi)M; -L M(I-Pi) 0]
// preconditioned by P = [A0 0; B -S0], A0 = blkdiag(a0 M, a1 nu M), S0 = L M^{-1} L',
// with inner product H = blkdiag(M - A0, S0).
class BtSystem {
 public:
  BtSystem(const DiscreteProblem& problem, const ActiveSet& active, std::shared_ptr<const InnerSolver> l_solver,
           double a0 = 0.9, double a1 = 0.9);

  Index dim() const { return 3 * n_; }
  const Vector& rhs() const { return rhs_; }
  Vector apply(const Vector& x) const;
  Vector apply_prec_inverse(const Vector& r) const;
  Vector apply_metric(const Vector& x) const;

  LinearOperator op() const;
  LinearOperator prec_inverse() const;
  LinearOperator metric() const;

  Vector lift(const Vector& reduced) const;
  Vector unlift(const Vector& lifted) const;

 private:
  const DiscreteProblem* problem_;
  ActiveSet active_;
  std::shared_ptr<const InnerSolver> l_solver_;
  Index n_;
  double a0_, a1_;
  SparseMatrix Lt_;
  Vector keep_;   // diagonal of I - Pi
  Vector u_fix_;  // bound values on active slots
  Vector rhs_;
};

Vector apply_bt_preconditioner(const BtSystem& sys, const Vector& r);

}  // namespace ocprec
