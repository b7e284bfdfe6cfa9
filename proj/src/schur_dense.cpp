#include "ocprec/schur_dense.hpp"

#include <cmath>

namespace ocprec {

DenseSaddleBlocks dense_saddle_blocks(const DiscreteProblem& pr, const ActiveSet& active) {
  const Index n = pr.n(), na = active.n_active();
  if (n > kDenseLimit) throw std::invalid_argument("dense build refused: problem too large");
  DenseSaddleBlocks out;
  out.A = DenseMatrix::Zero(2 * n, 2 * n);
  out.A.topLeftCorner(n, n).diagonal() = pr.m;
  out.A.bottomRightCorner(n, n).diagonal() = pr.nu() * pr.m;
  out.B = DenseMatrix::Zero(n + na, 2 * n);
  out.B.topLeftCorner(n, n) = pr.L.to_dense();
  out.B.block(0, n, n, n).diagonal() = -pr.m;
  for (Index k = 0; k < na; ++k) {
    out.B(n + k, active.active[k]) = pr.alpha_y();
    out.B(n + k, n + active.active[k]) = pr.alpha_u();
  }
  return out;
}

ScaledPencil build_scaled_pencil(const DiscreteProblem& pr, const ActiveSet& active) {
  const Index n = pr.n();
  if (n > kDenseLimit) throw std::invalid_argument("dense build refused: problem too large");
  const double nu = pr.nu();
  const auto [g1, g2] = gammas(nu, pr.alpha_u(), pr.alpha_y());
  const Vector pi = active.pi_diagonal();
  const Vector mis = pr.m.cwiseInverse().cwiseSqrt();
  // Every factor is sparse; densify only the results.
  const SparseMatrix F = pr.L.scale_rows(mis).scale_columns(mis).scaled(std::sqrt(nu));
  const SparseMatrix Ft = F.transpose();
  const Vector ipi = Vector::Ones(n) - pi;
  const Vector d1 = Vector::Ones(n) - g1 * pi;
  const Vector d2 = Vector::Ones(n) - g2 * pi;
  const double g12 = std::sqrt(g1 * g2);
  ScaledPencil s;
  s.F = F.to_dense();
  s.G = add(F.scale_columns(ipi), Ft.scale_rows(ipi)).to_dense();
  SparseMatrix H = multiply(F.scale_columns(d1), Ft);
  H = add(H, add(F.scale_columns(pi), Ft.scale_rows(pi)), 1.0, g12).add_diagonal(d2);
  s.H = H.to_dense();
  // Hhat = K K' with K = M^{-1/2} L1 M^{-1/2}
  const SparseMatrix K = build_l1(pr, active).scale_rows(mis).scale_columns(mis);
  s.Hhat = multiply(K, K.transpose()).to_dense();
  return s;
}

DenseSchurSet build_true_schur_dense(const DiscreteProblem& pr, const ActiveSet& active) {
  const Index n = pr.n(), na = active.n_active();
  if (n > kDenseLimit) throw std::invalid_argument("dense build refused: problem too large");
  const double nu = pr.nu(), au = pr.alpha_u(), ay = pr.alpha_y();
  const double cp = ay * ay * nu + au * au;
  const Vector& m = pr.m;
  const Vector minv = m.cwiseInverse();
  const Vector pi = active.pi_diagonal();
  const DenseMatrix L = pr.L.to_dense();
  DenseSchurSet s;

  const auto blocks = dense_saddle_blocks(pr, active);
  Vector ainv(2 * n);
  ainv << minv, minv / nu;
  s.S = blocks.B * ainv.asDiagonal() * blocks.B.transpose();

  // W = alpha_y nu L M^{-1} - alpha_u I
  DenseMatrix W = ay * nu * L * minv.asDiagonal();
  W.diagonal().array() -= au;
  const Vector piM = pi.cwiseProduct(m);
  s.SS = nu * L * minv.asDiagonal() * L.transpose();
  s.SS.diagonal() += m;
  s.SS -= (W * piM.asDiagonal() * W.transpose()) / cp;

  const DenseMatrix L1 = build_l1(pr, active).to_dense();
  s.SShat = L1 * minv.asDiagonal() * L1.transpose();

  DenseMatrix Pt = DenseMatrix::Zero(n, na);
  for (Index k = 0; k < na; ++k) Pt(active.active[k], k) = 1.0;
  s.R = DenseMatrix::Identity(n + na, n + na);
  s.R.topRightCorner(n, na) = W * m.asDiagonal() * Pt / cp;
  s.D = DenseMatrix::Zero(na, na);
  for (Index k = 0; k < na; ++k) s.D(k, k) = cp * minv[active.active[k]];
  DenseMatrix mid = DenseMatrix::Zero(n + na, n + na);
  mid.topLeftCorner(n, n) = s.SShat;
  mid.bottomRightCorner(na, na) = s.D;
  s.Shat = s.R * mid * s.R.transpose() / nu;

  auto sp = build_scaled_pencil(pr, active);
  s.F = std::move(sp.F);
  s.G = std::move(sp.G);
  s.H = std::move(sp.H);
  s.Hhat = std::move(sp.Hhat);
  return s;
}

}  // namespace ocprec
