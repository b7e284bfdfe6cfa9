#include "ocprec/kkt.hpp"

#include <algorithm>

namespace ocprec {

ActiveSet ActiveSet::from_indices(Index n, std::vector<Index> upper, std::vector<Index> lower) {
  ActiveSet s;
  s.n = n;
  std::sort(upper.begin(), upper.end());
  std::sort(lower.begin(), lower.end());
  s.upper = std::move(upper);
  s.lower = std::move(lower);
  s.position.assign(n, -1);
  std::vector<char> mark(n, 0);
  for (Index i : s.upper) {
    if (i < 0 || i >= n) throw std::invalid_argument("active index out of range");
    if (mark[i]) throw std::invalid_argument("duplicate active index");
    mark[i] = 1;
  }
  for (Index i : s.lower) {
    if (i < 0 || i >= n) throw std::invalid_argument("active index out of range");
    if (mark[i]) throw std::invalid_argument("upper and lower active sets overlap");
    mark[i] = 1;
  }
  for (Index i = 0; i < n; ++i) {
    if (mark[i]) {
      s.position[i] = static_cast<Index>(s.active.size());
      s.active.push_back(i);
    } else {
      s.inactive.push_back(i);
    }
  }
  return s;
}

ActiveSet ActiveSet::full(Index n) {
  std::vector<Index> all(n);
  for (Index i = 0; i < n; ++i) all[i] = i;
  return from_indices(n, std::move(all), {});
}

Vector ActiveSet::pi_diagonal() const {
  Vector d = Vector::Zero(n);
  for (Index i : active) d[i] = 1.0;
  return d;
}

Vector gather_active(const ActiveSet& s, const Vector& v) {
  if (v.size() != s.n) throw DimensionError("gather length mismatch");
  Vector out(s.n_active());
  for (Index k = 0; k < s.n_active(); ++k) out[k] = v[s.active[k]];
  return out;
}

Vector scatter_active(const ActiveSet& s, const Vector& va) {
  if (va.size() != s.n_active()) throw DimensionError("scatter length mismatch");
  Vector out = Vector::Zero(s.n);
  for (Index k = 0; k < s.n_active(); ++k) out[s.active[k]] = va[k];
  return out;
}

Vector complementarity(const Vector& u, const Vector& y, const Vector& mu, const ComplementarityData& d) {
  const Index n = mu.size();
  if (u.size() != n || y.size() != n || d.a.size() != n || d.b.size() != n) throw DimensionError("length mismatch");
  Vector C(n);
  for (Index i = 0; i < n; ++i) {
    const double v = d.alpha_u * u[i] + d.alpha_y * y[i];
    double ci = mu[i];
    if (d.has_upper[i]) ci -= std::max(0.0, mu[i] + d.c * (v - d.b[i]));
    if (d.has_lower[i]) ci -= std::min(0.0, mu[i] + d.c * (v - d.a[i]));
    C[i] = ci;
  }
  return C;
}

ActiveSet active_sets(const KktPoint& x, const DiscreteProblem& pr, double c) {
  const Index n = pr.n();
  if (x.n() != n) throw DimensionError("point size mismatch");
  std::vector<Index> up, lo;
  for (Index i = 0; i < n; ++i) {
    const double v = pr.alpha_u() * x.u[i] + pr.alpha_y() * x.y[i];
    if (pr.has_upper[i] && x.mu[i] + c * (v - pr.b[i]) > 0.0)
      up.push_back(i);
    else if (pr.has_lower[i] && x.mu[i] + c * (v - pr.a[i]) < 0.0)
      lo.push_back(i);
  }
  return ActiveSet::from_indices(n, std::move(up), std::move(lo));
}

Vector kkt_residual(const KktPoint& x, const DiscreteProblem& pr, double c) {
  const Index n = pr.n();
  if (x.y.size() != n || x.u.size() != n || x.p.size() != n || x.mu.size() != n)
    throw DimensionError("point size mismatch");
  const Vector& m = pr.m;
  Vector F(4 * n);
  F.segment(0, n) = m.cwiseProduct(x.y - pr.y_d) + pr.L.multiply_transpose(x.p) + pr.alpha_y() * x.mu;
  F.segment(n, n) = pr.nu() * m.cwiseProduct(x.u) - m.cwiseProduct(x.p) + pr.alpha_u() * x.mu;
  F.segment(2 * n, n) = pr.L.multiply(x.y) - m.cwiseProduct(x.u) + pr.d;
  F.segment(3 * n, n) = complementarity(
      x.u, x.y, x.mu, {pr.a, pr.b, pr.has_lower, pr.has_upper, pr.alpha_u(), pr.alpha_y(), c});
  return F;
}

NewtonSystem::NewtonSystem(const DiscreteProblem& problem, ActiveSet active)
    : problem_(&problem), active_(std::move(active)), Lt_(problem.L.transpose()) {
  const Index n = problem.n();
  if (active_.n != n) throw DimensionError("active set size mismatch");
  const Index na = active_.n_active();
  rhs_ = Vector::Zero(dim());
  rhs_.segment(0, n) = problem.m.cwiseProduct(problem.y_d);
  rhs_.segment(2 * n, n) = problem.d;
  for (Index k = 0; k < na; ++k) {
    const Index i = active_.active[k];
    // Upper membership takes precedence; the sets are disjoint anyway.
    const bool up = std::binary_search(active_.upper.begin(), active_.upper.end(), i);
    rhs_[3 * n + k] = up ? problem.b[i] : problem.a[i];
  }
}

Vector NewtonSystem::apply(const Vector& x) const {
  if (x.size() != dim()) throw DimensionError("Newton system input length mismatch");
  const auto& pr = *problem_;
  const Index n = pr.n();
  const Index na = active_.n_active();
  const double ay = pr.alpha_y(), au = pr.alpha_u(), nu = pr.nu();
  const auto y = x.segment(0, n), u = x.segment(n, n), p = x.segment(2 * n, n), mua = x.segment(3 * n, na);
  const Vector& m = pr.m;
  Vector out(dim());
  Vector PtMu = Vector::Zero(n);
  for (Index k = 0; k < na; ++k) PtMu[active_.active[k]] = mua[k];
  out.segment(0, n) = m.cwiseProduct(y) + Lt_.multiply(p) + ay * PtMu;
  out.segment(n, n) = nu * m.cwiseProduct(u) - m.cwiseProduct(p) + au * PtMu;
  out.segment(2 * n, n) = pr.L.multiply(y) - m.cwiseProduct(u);
  for (Index k = 0; k < na; ++k) {
    const Index i = active_.active[k];
    out[3 * n + k] = ay * y[i] + au * u[i];
  }
  return out;
}

LinearOperator NewtonSystem::as_operator() const {
  const NewtonSystem* self = this;
  auto f = [self](const Vector& x, Vector& y) { y = self->apply(x); };
  return LinearOperator(dim(), dim(), f, f);
}

SparseMatrix NewtonSystem::assemble() const {
  const auto& pr = *problem_;
  const Index n = pr.n();
  const Index na = active_.n_active();
  const double ay = pr.alpha_y(), au = pr.alpha_u(), nu = pr.nu();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * n + 2 * pr.L.nnz() + 4 * na));
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, pr.m[i]});
    t.push_back({n + i, n + i, nu * pr.m[i]});
    t.push_back({n + i, 2 * n + i, -pr.m[i]});
    t.push_back({2 * n + i, n + i, -pr.m[i]});
  }
  const auto& off = pr.L.row_offsets();
  for (Index i = 0; i < n; ++i) {
    for (Index k = off[i]; k < off[i + 1]; ++k) {
      const Index j = pr.L.col_indices()[k];
      const double v = pr.L.values()[k];
      t.push_back({2 * n + i, j, v});  // L in block (3,1)
      t.push_back({j, 2 * n + i, v});  // L' in block (1,3)
    }
  }
  for (Index k = 0; k < na; ++k) {
    const Index i = active_.active[k];
    if (ay != 0.0) {
      t.push_back({3 * n + k, i, ay});
      t.push_back({i, 3 * n + k, ay});
    }
    if (au != 0.0) {
      t.push_back({3 * n + k, n + i, au});
      t.push_back({n + i, 3 * n + k, au});
    }
  }
  return SparseMatrix::from_triplets(dim(), dim(), std::move(t));
}

NewtonSystem assemble_newton_system(const ActiveSet& active, const DiscreteProblem& problem) {
  return NewtonSystem(problem, active);
}

KktPoint expand_solution(const Vector& xr, const ActiveSet& active) {
  const Index n = active.n;
  if (xr.size() != 3 * n + active.n_active()) throw DimensionError("reduced vector length mismatch");
  KktPoint pt;
  pt.y = xr.segment(0, n);
  pt.u = xr.segment(n, n);
  pt.p = xr.segment(2 * n, n);
  pt.mu = scatter_active(active, xr.segment(3 * n, active.n_active()));
  return pt;
}

Vector reduce_point(const KktPoint& x, const ActiveSet& active) {
  const Index n = active.n;
  if (x.n() != n) throw DimensionError("point size mismatch");
  Vector out(3 * n + active.n_active());
  out << x.y, x.u, x.p, gather_active(active, x.mu);
  return out;
}

}  // namespace ocprec
