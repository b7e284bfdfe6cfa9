#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocprec/linear_operator.hpp"

namespace ocprec {

class KrylovBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveStats {
  int iterations = 0;
  // Unpreconditioned residual 2-norms; entry 0 is the initial residual.
  std::vector<double> residual_history;
  bool converged = false;
  std::optional<std::string> breakdown_reason;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

struct KrylovResult {
  Vector x;
  SolveStats stats;
};

// Unrestarted GMRES, right preconditioned. Stops on the true residual, or returns the best
// iterate unconverged once the true residual stalls below rounding level.
KrylovResult gmres(const LinearOperator& op, const LinearOperator& right_prec, const Vector& b, const Vector& x0,
                   double target, int maxit = 80);

// Preconditioned MINRES; the residual b - A x is formed explicitly each step.
KrylovResult minres(const LinearOperator& op, const LinearOperator& spd_prec, const Vector& b, const Vector& x0,
                    double target, int maxit = 1000);

// Bramble-Pasciak CG: CG on P^{-1} K in the inner product <x, y>_H = x' H y.
// bt_prec_inverse applies P^{-1}; h_metric applies H.
KrylovResult bpcg(const LinearOperator& op, const LinearOperator& bt_prec_inverse, const LinearOperator& h_metric,
                  const Vector& b, const Vector& x0, double target, int maxit = 1000);

}  // namespace ocprec
