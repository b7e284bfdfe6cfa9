#include "ocprec/schur.hpp"

#include <cmath>

#include "ocprec/multigrid.hpp"

namespace ocprec {

std::pair<double, double> gammas(double nu, double alpha_u, double alpha_y) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  const double cp = alpha_y * alpha_y * nu + alpha_u * alpha_u;
  if (!(cp > 0.0)) throw std::invalid_argument("alpha_u and alpha_y cannot both vanish");
  const double g1 = alpha_y * alpha_y * nu / cp;
  return {g1, 1.0 - g1};
}

SparseMatrix build_l1(const DiscreteProblem& pr, const ActiveSet& active) {
  const auto [g1, g2] = gammas(pr.nu(), pr.alpha_u(), pr.alpha_y());
  const Vector pi = active.pi_diagonal();
  Vector col_scale(pr.n()), diag(pr.n());
  for (Index i = 0; i < pr.n(); ++i) {
    col_scale[i] = std::sqrt(pr.nu()) * std::sqrt(1.0 - g1 * pi[i]);
    diag[i] = std::sqrt(1.0 - g2 * pi[i]) * pr.m[i];
  }
  return pr.L.scale_columns(col_scale).add_diagonal(diag);
}

SchurFactor build_schur_factor(const DiscreteProblem& pr, const ActiveSet& active, const InnerSolverPolicy& policy) {
  if (active.n != pr.n()) throw DimensionError("active set size mismatch");
  SchurFactor f;
  std::tie(f.gamma1, f.gamma2) = gammas(pr.nu(), pr.alpha_u(), pr.alpha_y());
  f.nu = pr.nu();
  f.nu_scale = 1.0 / pr.nu();
  f.alpha_u = pr.alpha_u();
  f.alpha_y = pr.alpha_y();
  f.cprime = f.alpha_y * f.alpha_y * f.nu + f.alpha_u * f.alpha_u;
  f.L1 = build_l1(pr, active);
  if (policy.kind == InnerSolverPolicy::Kind::Direct)
    f.l1_solver = std::make_shared<Factorization>(f.L1);
  else
    f.l1_solver = std::make_shared<MultigridSolver>(f.L1, pr.grid.level, policy);
  f.m = pr.m;
  f.active = active;
  f.problem = &pr;

  // E = (alpha_y nu L - alpha_u M) P' / cprime
  const Index n = pr.n();
  std::vector<Triplet> t;
  const auto& off = pr.L.row_offsets();
  if (f.alpha_y != 0.0) {
    for (Index i = 0; i < n; ++i)
      for (Index k = off[i]; k < off[i + 1]; ++k) {
        const Index slot = active.position[pr.L.col_indices()[k]];
        if (slot >= 0) t.push_back({i, slot, f.alpha_y * f.nu * pr.L.values()[k] / f.cprime});
      }
  }
  if (f.alpha_u != 0.0)
    for (Index k = 0; k < active.n_active(); ++k)
      t.push_back({active.active[k], k, -f.alpha_u * pr.m[active.active[k]] / f.cprime});
  f.coupling = SparseMatrix::from_triplets(n, active.n_active(), std::move(t));

  f.trailing_diag.resize(active.n_active());
  for (Index k = 0; k < active.n_active(); ++k) f.trailing_diag[k] = f.cprime / pr.m[active.active[k]];
  return f;
}

Vector apply_shat_inverse(const SchurFactor& f, const Vector& r) {
  const Index n = f.n(), na = f.n_active();
  if (r.size() != n + na) throw DimensionError("Schur rhs length mismatch");
  const Vector r2 = r.segment(n, na);
  Vector w1 = r.head(n);
  f.coupling.multiply_add(r2, w1, -1.0);
  const Vector v1 = f.l1_solver->solve_transpose(f.m.cwiseProduct(f.l1_solver->solve(w1)));
  Vector z(n + na);
  z.head(n) = f.nu * v1;
  z.segment(n, na) = f.nu * (r2.cwiseQuotient(f.trailing_diag) - f.coupling.multiply_transpose(v1));
  return z;
}

namespace {

// (z_p, z_mu) -> B' z split as (y, u) parts.
void apply_bt(const SchurFactor& f, const Vector& zp, const Vector& zmu, Vector& oy, Vector& ou) {
  const Vector ptmu = scatter_active(f.active, zmu);
  oy = f.problem->L.multiply_transpose(zp) + f.alpha_y * ptmu;
  ou = -f.m.cwiseProduct(zp) + f.alpha_u * ptmu;
}

}  // namespace

Vector apply_ipf_inverse(const SchurFactor& f, const Vector& r) {
  const Index n = f.n(), na = f.n_active();
  if (r.size() != 3 * n + na) throw DimensionError("preconditioner input length mismatch");
  const Vector ty = r.segment(0, n).cwiseQuotient(f.m);
  const Vector tu = r.segment(n, n).cwiseQuotient(f.m) / f.nu;

  Vector t2(n + na);
  t2.head(n) = r.segment(2 * n, n) - f.problem->L.multiply(ty) + f.m.cwiseProduct(tu);
  for (Index k = 0; k < na; ++k) {
    const Index i = f.active.active[k];
    t2[n + k] = r[3 * n + k] - (f.alpha_y * ty[i] + f.alpha_u * tu[i]);
  }
  const Vector z2 = -apply_shat_inverse(f, t2);

  Vector by, bu;
  apply_bt(f, z2.head(n), z2.segment(n, na), by, bu);
  Vector z(3 * n + na);
  z.segment(0, n) = ty - by.cwiseQuotient(f.m);
  z.segment(n, n) = tu - bu.cwiseQuotient(f.m) / f.nu;
  z.segment(2 * n, n + na) = z2;
  return z;
}

Vector apply_bdf_inverse(const SchurFactor& f, const Vector& r) {
  const Index n = f.n(), na = f.n_active();
  if (r.size() != 3 * n + na) throw DimensionError("preconditioner input length mismatch");
  Vector z(3 * n + na);
  z.segment(0, n) = r.segment(0, n).cwiseQuotient(f.m);
  z.segment(n, n) = r.segment(n, n).cwiseQuotient(f.m) / f.nu;
  z.segment(2 * n, n + na) = apply_shat_inverse(f, r.segment(2 * n, n + na));
  return z;
}

LinearOperator ipf_operator(std::shared_ptr<const SchurFactor> f) {
  const Index d = 3 * f->n() + f->n_active();
  return LinearOperator(d, d, [f](const Vector& x, Vector& y) { y = apply_ipf_inverse(*f, x); });
}

LinearOperator bdf_operator(std::shared_ptr<const SchurFactor> f) {
  const Index d = 3 * f->n() + f->n_active();
  auto g = [f](const Vector& x, Vector& y) { y = apply_bdf_inverse(*f, x); };
  return LinearOperator(d, d, g, g);
}

}  // namespace ocprec
