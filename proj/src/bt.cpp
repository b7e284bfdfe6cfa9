#include "ocprec/schur.hpp"

namespace ocprec {

BtSystem::BtSystem(const DiscreteProblem& pr, const ActiveSet& active, std::shared_ptr<const InnerSolver> l_solver,
                   double a0, double a1)
    : problem_(&pr), active_(active), l_solver_(std::move(l_solver)), n_(pr.n()), a0_(a0), a1_(a1),
      Lt_(pr.L.transpose()) {
  if (pr.alpha_u() != 1.0 || pr.alpha_y() != 0.0)
    throw std::invalid_argument("the block triangular comparison path supports control constraints only");
  if (!(a0 > 0.0 && a0 < 1.0 && a1 > 0.0 && a1 < 1.0))
    throw std::invalid_argument("A0, A1 scalings must lie in (0, 1)");
  if (!l_solver_ || l_solver_->size() != n_) throw DimensionError("L solver size mismatch");
  keep_ = Vector::Ones(n_) - active_.pi_diagonal();
  u_fix_ = Vector::Zero(n_);
  for (Index i : active_.upper) u_fix_[i] = pr.b[i];
  for (Index i : active_.lower) u_fix_[i] = pr.a[i];
  rhs_.resize(3 * n_);
  rhs_ << pr.m.cwiseProduct(pr.y_d), pr.nu() * pr.m.cwiseProduct(u_fix_), pr.d - pr.m.cwiseProduct(u_fix_);
}

Vector BtSystem::apply(const Vector& x) const {
  if (x.size() != dim()) throw DimensionError("BT system input length mismatch");
  const auto& pr = *problem_;
  const Vector& m = pr.m;
  const auto y = x.segment(0, n_), u = x.segment(n_, n_), q = x.segment(2 * n_, n_);
  Vector o(3 * n_);
  o.segment(0, n_) = m.cwiseProduct(y) - Lt_.multiply(q);
  o.segment(n_, n_) = pr.nu() * m.cwiseProduct(u) + keep_.cwiseProduct(m.cwiseProduct(q));
  o.segment(2 * n_, n_) = -pr.L.multiply(y) + m.cwiseProduct(keep_.cwiseProduct(u));
  return o;
}

Vector BtSystem::apply_prec_inverse(const Vector& r) const {
  if (r.size() != dim()) throw DimensionError("BT preconditioner input length mismatch");
  const auto& pr = *problem_;
  const Vector& m = pr.m;
  Vector z(3 * n_);
  const Vector zy = r.segment(0, n_).cwiseQuotient(m) / a0_;
  const Vector zu = r.segment(n_, n_).cwiseQuotient(m) / (a1_ * pr.nu());
  const Vector s = -pr.L.multiply(zy) + m.cwiseProduct(keep_.cwiseProduct(zu)) - r.segment(2 * n_, n_);
  // S0^{-1} = L^{-T} M L^{-1}
  z << zy, zu, l_solver_->solve_transpose(m.cwiseProduct(l_solver_->solve(s)));
  return z;
}

Vector BtSystem::apply_metric(const Vector& x) const {
  if (x.size() != dim()) throw DimensionError("BT metric input length mismatch");
  const auto& pr = *problem_;
  const Vector& m = pr.m;
  Vector o(3 * n_);
  o.segment(0, n_) = (1.0 - a0_) * m.cwiseProduct(x.segment(0, n_));
  o.segment(n_, n_) = (1.0 - a1_) * pr.nu() * m.cwiseProduct(x.segment(n_, n_));
  o.segment(2 * n_, n_) = pr.L.multiply(Lt_.multiply(x.segment(2 * n_, n_)).cwiseQuotient(m));
  return o;
}

LinearOperator BtSystem::op() const {
  const BtSystem* s = this;
  auto f = [s](const Vector& x, Vector& y) { y = s->apply(x); };
  return LinearOperator(dim(), dim(), f, f);
}

LinearOperator BtSystem::prec_inverse() const {
  const BtSystem* s = this;
  return LinearOperator(dim(), dim(), [s](const Vector& x, Vector& y) { y = s->apply_prec_inverse(x); });
}

LinearOperator BtSystem::metric() const {
  const BtSystem* s = this;
  auto f = [s](const Vector& x, Vector& y) { y = s->apply_metric(x); };
  return LinearOperator(dim(), dim(), f, f);
}

Vector BtSystem::lift(const Vector& reduced) const {
  if (reduced.size() != 3 * n_ + active_.n_active()) throw DimensionError("reduced vector length mismatch");
  Vector x(3 * n_);
  x << reduced.segment(0, n_), reduced.segment(n_, n_), -reduced.segment(2 * n_, n_);
  return x;
}

Vector BtSystem::unlift(const Vector& lifted) const {
  if (lifted.size() != dim()) throw DimensionError("lifted vector length mismatch");
  const auto& pr = *problem_;
  const Vector u = lifted.segment(n_, n_);
  const Vector q = lifted.segment(2 * n_, n_);
  const Vector mu_full = -pr.m.cwiseProduct(q) - pr.nu() * pr.m.cwiseProduct(u);
  Vector out(3 * n_ + active_.n_active());
  out << lifted.segment(0, n_), u, -q, gather_active(active_, mu_full);
  return out;
}

Vector apply_bt_preconditioner(const BtSystem& sys, const Vector& r) { return sys.apply_prec_inverse(r); }

}  // namespace ocprec
