#include "ocprec/multigrid.hpp"

namespace ocprec {

namespace {

std::vector<std::vector<std::pair<Index, double>>> prolongation_1d(Index nf, Index nc) {
  std::vector<std::vector<std::pair<Index, double>>> rows(nf);
  for (Index i = 0; i < nf; ++i) {
    if (i % 2 == 1) {
      rows[i].push_back({(i - 1) / 2, 1.0});
    } else {
      if (i / 2 - 1 >= 0) rows[i].push_back({i / 2 - 1, 0.5});
      if (i / 2 < nc) rows[i].push_back({i / 2, 0.5});
    }
  }
  return rows;
}

}  // namespace

SparseMatrix prolongation(int p) {
  if (p < 2) throw std::invalid_argument("prolongation needs a level >= 2");
  const Index nf = (Index{1} << (p + 1)) - 1;
  const Index nc = (Index{1} << p) - 1;
  const auto r = prolongation_1d(nf, nc);
  std::vector<Triplet> t;
  for (Index k = 0; k < nf; ++k)
    for (Index j = 0; j < nf; ++j)
      for (Index i = 0; i < nf; ++i)
        for (auto [ck, wk] : r[k])
          for (auto [cj, wj] : r[j])
            for (auto [ci, wi] : r[i])
              t.push_back({i + nf * (j + nf * k), ci + nc * (cj + nc * ck), wi * wj * wk});
  return SparseMatrix::from_triplets(nf * nf * nf, nc * nc * nc, std::move(t));
}

MultigridSolver::MultigridSolver(const SparseMatrix& a, int level, const InnerSolverPolicy& policy)
    : pre_(policy.pre_smooth), post_(policy.post_smooth), omega_(policy.damping) {
  const Index n1d = (Index{1} << (level + 1)) - 1;
  if (a.rows() != a.cols() || a.rows() != n1d * n1d * n1d)
    throw DimensionError("multigrid matrix does not match the grid level");
  if (pre_ < 0 || post_ < 0 || !(omega_ > 0.0)) throw std::invalid_argument("invalid smoother settings");
  SparseMatrix cur = a;
  for (int p = level; p >= 1; --p) {
    Level lv;
    lv.a = cur;
    lv.at = cur.transpose();
    lv.inv_diag = cur.diagonal().cwiseInverse();
    if (!lv.inv_diag.allFinite()) throw SingularMatrixError("multigrid smoother: zero diagonal");
    if (p > 1) {
      lv.p = prolongation(p);
      lv.pt = lv.p.transpose();
      cur = multiply(lv.pt, multiply(cur, lv.p));
    }
    levels_.push_back(std::move(lv));
  }
  coarse_ = std::make_unique<Factorization>(levels_.back().a);
}

Vector MultigridSolver::cycle(std::size_t l, const Vector& b) const {
  if (l + 1 == levels_.size()) return coarse_->solve(b);
  const Level& lv = levels_[l];
  Vector x = Vector::Zero(b.size());
  for (int s = 0; s < pre_; ++s) x += omega_ * lv.inv_diag.cwiseProduct(b - lv.a.multiply(x));
  const Vector r = b - lv.a.multiply(x);
  x += lv.p.multiply(cycle(l + 1, lv.pt.multiply(r)));
  for (int s = 0; s < post_; ++s) x += omega_ * lv.inv_diag.cwiseProduct(b - lv.a.multiply(x));
  return x;
}

// Reverse-mode transpose of cycle(): walks the same steps backwards.
Vector MultigridSolver::cycle_adjoint(std::size_t l, const Vector& g) const {
  if (l + 1 == levels_.size()) return coarse_->solve_transpose(g);
  const Level& lv = levels_[l];
  Vector xbar = g;
  Vector bbar = Vector::Zero(g.size());
  auto smooth_adjoint = [&]() {
    const Vector dx = lv.inv_diag.cwiseProduct(xbar);
    bbar += omega_ * dx;
    xbar -= omega_ * lv.at.multiply(dx);
  };
  for (int s = 0; s < post_; ++s) smooth_adjoint();
  const Vector rbar = lv.p.multiply(cycle_adjoint(l + 1, lv.pt.multiply(xbar)));
  bbar += rbar;
  xbar -= lv.at.multiply(rbar);
  for (int s = 0; s < pre_; ++s) smooth_adjoint();
  return bbar;
}

Vector MultigridSolver::solve(const Vector& b) const {
  if (b.size() != size()) throw DimensionError("multigrid rhs length mismatch");
  return cycle(0, b);
}

Vector MultigridSolver::solve_transpose(const Vector& b) const {
  if (b.size() != size()) throw DimensionError("multigrid rhs length mismatch");
  return cycle_adjoint(0, b);
}

}  // namespace ocprec
