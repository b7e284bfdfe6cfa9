#include "ocprec/krylov.hpp"

#include <cmath>
#include <limits>

namespace ocprec {

namespace {

void check_square(const LinearOperator& op, const LinearOperator& prec, const Vector& b, const Vector& x0) {
  if (op.rows() != op.cols()) throw DimensionError("Krylov solvers need a square operator");
  if (prec.rows() != op.rows() || prec.cols() != op.cols()) throw DimensionError("preconditioner size mismatch");
  if (b.size() != op.rows() || x0.size() != op.cols()) throw DimensionError("rhs or initial guess size mismatch");
}

}  // namespace

KrylovResult gmres(const LinearOperator& op, const LinearOperator& right_prec, const Vector& b, const Vector& x0,
                   double target, int maxit) {
  check_square(op, right_prec, b, x0);
  if (maxit < 1) throw std::invalid_argument("maxit must be positive");
  const Index n = b.size();
  KrylovResult res{x0, {}};
  auto& st = res.stats;

  Vector r = b - op.apply(x0);
  double beta = r.norm();
  st.residual_history.push_back(beta);
  if (beta <= target) {
    st.converged = true;
    return res;
  }

  const int m = maxit;
  DenseMatrix V(n, m + 1);
  DenseMatrix H = DenseMatrix::Zero(m + 1, m);
  Vector cs = Vector::Zero(m), sn = Vector::Zero(m);
  Vector g = Vector::Zero(m + 1);
  V.col(0) = r / beta;
  g[0] = beta;

  double best_true = beta;
  Vector best_x = x0;

  auto form_iterate = [&](int k) {
    // y = H(0:k,0:k)^{-1} g(0:k), upper triangular after the rotations.
    Vector y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Vector t = V.leftCols(k) * y;
    return Vector(x0 + right_prec.apply(t));
  };

  for (int j = 0; j < m; ++j) {
    Vector w = op.apply(right_prec.apply(V.col(j)));
    const double wnorm0 = w.norm();
    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        double hij = V.col(i).dot(w);
        H(i, j) += hij;
        w.noalias() -= hij * V.col(i);
      }
    }
    const double hnext = w.norm();
    H(j + 1, j) = hnext;
    for (int i = 0; i < j; ++i) {
      double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
      H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
      H(i, j) = t;
    }
    double denom = std::hypot(H(j, j), H(j + 1, j));
    // P^{-1}v_j maps into the span of the previous images: singular on the Krylov space.
    if (denom <= 1e-14 * wnorm0) {
      st.breakdown_reason = "singular Hessenberg";
      throw KrylovBreakdown("GMRES breakdown: singular Hessenberg matrix");
    }
    cs[j] = H(j, j) / denom;
    sn[j] = H(j + 1, j) / denom;
    H(j, j) = denom;
    H(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];
    const double est = std::abs(g[j + 1]);
    st.iterations = j + 1;

    const bool lucky = hnext <= 1e-14 * wnorm0;
    if (est <= target || lucky || j + 1 == m) {
      res.x = form_iterate(j + 1);
      const double true_res = (b - op.apply(res.x)).norm();
      st.residual_history.push_back(true_res);
      if (true_res <= target) {
        st.converged = true;
        return res;
      }
      if (lucky && est > target) {
        st.breakdown_reason = "Arnoldi breakdown with nonzero residual";
        throw KrylovBreakdown("GMRES: Arnoldi breakdown with nonzero residual");
      }
      // Below the estimate's target the true residual is limited by rounding in x0 + P^{-1}Vy;
      // once it stops decreasing more basis vectors cannot help.
      const bool stalled = est <= target && true_res >= best_true;
      if (true_res < best_true) {
        best_true = true_res;
        best_x = res.x;
      }
      if (stalled || lucky || j + 1 == m) {
        if (stalled || lucky) st.breakdown_reason = "stagnation";
        res.x = best_x;
        st.residual_history.back() = best_true;
        return res;
      }
    } else {
      st.residual_history.push_back(est);
    }
    V.col(j + 1) = w / hnext;
  }
  return res;
}

KrylovResult minres(const LinearOperator& op, const LinearOperator& spd_prec, const Vector& b, const Vector& x0,
                    double target, int maxit) {
  check_square(op, spd_prec, b, x0);
  if (maxit < 1) throw std::invalid_argument("maxit must be positive");
  KrylovResult res{x0, {}};
  auto& st = res.stats;
  Vector& x = res.x;

  Vector r1 = b - op.apply(x0);
  double rnorm = r1.norm();
  st.residual_history.push_back(rnorm);
  if (rnorm <= target) {
    st.converged = true;
    return res;
  }
  Vector y = spd_prec.apply(r1);
  double b1sq = r1.dot(y);
  if (b1sq <= 0.0) {
    st.breakdown_reason = "indefinite preconditioner";
    throw KrylovBreakdown("MINRES: preconditioner is not positive definite");
  }
  const double beta1 = std::sqrt(b1sq);

  const Index n = b.size();
  Vector r2 = r1;
  Vector v(n), w = Vector::Zero(n), w1(n), w2 = Vector::Zero(n);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;

  for (int itn = 1; itn <= maxit; ++itn) {
    v = y / beta;
    y = op.apply(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = spd_prec.apply(r2);
    oldb = beta;
    const double bsq = r2.dot(y);
    if (bsq < 0.0) {
      st.breakdown_reason = "indefinite preconditioner";
      throw KrylovBreakdown("MINRES: preconditioner is not positive definite");
    }
    beta = std::sqrt(bsq);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    st.iterations = itn;
    rnorm = (b - op.apply(x)).norm();
    st.residual_history.push_back(rnorm);
    if (rnorm <= target) {
      st.converged = true;
      return res;
    }
    if (beta == 0.0) {
      // Invariant Krylov space reached without meeting the target.
      st.breakdown_reason = "Lanczos breakdown";
      return res;
    }
  }
  return res;
}

KrylovResult bpcg(const LinearOperator& op, const LinearOperator& bt_prec_inverse, const LinearOperator& h_metric,
                  const Vector& b, const Vector& x0, double target, int maxit) {
  check_square(op, bt_prec_inverse, b, x0);
  if (h_metric.rows() != op.rows() || h_metric.cols() != op.cols())
    throw DimensionError("inner-product operator size mismatch");
  if (maxit < 1) throw std::invalid_argument("maxit must be positive");
  KrylovResult res{x0, {}};
  auto& st = res.stats;
  Vector& x = res.x;

  auto indefinite = [&st]() {
    st.breakdown_reason = "indefinite metric";
    throw KrylovBreakdown("BPCG: indefinite metric");
  };

  Vector r = b - op.apply(x0);
  double rnorm = r.norm();
  st.residual_history.push_back(rnorm);
  if (rnorm <= target) {
    st.converged = true;
    return res;
  }
  Vector z = bt_prec_inverse.apply(r);
  double rho = z.dot(h_metric.apply(z));
  if (rho <= 0.0) indefinite();
  Vector d = z;
  Vector Kd = op.apply(d);

  for (int it = 1; it <= maxit; ++it) {
    Vector q = bt_prec_inverse.apply(Kd);
    const double dq = d.dot(h_metric.apply(q));
    if (dq <= 0.0) indefinite();
    const double alpha = rho / dq;
    x += alpha * d;
    r -= alpha * Kd;
    z -= alpha * q;
    st.iterations = it;
    rnorm = r.norm();
    if (rnorm <= target) {
      r = b - op.apply(x);
      rnorm = r.norm();
      if (rnorm > target) z = bt_prec_inverse.apply(r);
    }
    st.residual_history.push_back(rnorm);
    if (rnorm <= target) {
      st.converged = true;
      return res;
    }
    const double rho_new = z.dot(h_metric.apply(z));
    if (rho_new <= 0.0) indefinite();
    const double beta = rho_new / rho;
    rho = rho_new;
    d = z + beta * d;
    Kd = op.apply(d);
  }
  return res;
}

}  // namespace ocprec
