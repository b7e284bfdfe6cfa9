#include "ocprec/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace ocprec {

namespace {

DenseMatrix sym(const DenseMatrix& a) { return 0.5 * (a + a.transpose()); }

double spectral_norm(const DenseMatrix& a) {
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double min_singular_value(const DenseMatrix& a) {
  Eigen::BDCSVD<DenseMatrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> gen_eig(const DenseMatrix& a, const DenseMatrix& b,
                                                               int options) {
  const DenseMatrix bs = sym(b);
  Eigen::LLT<DenseMatrix> llt(bs);
  if (llt.info() != Eigen::Success) throw SpectralError("right-hand matrix of the pencil is not SPD");
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(sym(a), bs, options | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw SpectralError("generalized eigensolver failed");
  return es;
}

// Eigenvalues only: one Cholesky factor of b, then C = L^{-1} a L^{-T}.
Vector gen_eigenvalues(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::LLT<DenseMatrix> llt(sym(b));
  if (llt.info() != Eigen::Success) throw SpectralError("right-hand matrix of the pencil is not SPD");
  DenseMatrix c = sym(a);
  llt.matrixL().solveInPlace<Eigen::OnTheLeft>(c);
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(c);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(c, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SpectralError("generalized eigensolver failed");
  return es.eigenvalues();
}

}  // namespace

Vector pencil_eigs(const DenseMatrix& S, const DenseMatrix& Shat) {
  if (S.rows() != S.cols() || Shat.rows() != S.rows() || Shat.cols() != S.cols())
    throw DimensionError("pencil matrices must be square and equally sized");
  if (S.rows() == 0) return Vector();
  return gen_eigenvalues(S, Shat);
}

double alpha_min(const DenseMatrix& G, const DenseMatrix& H) {
  const Vector ev = pencil_eigs(G, H);
  if (ev.size() == 0) return 0.0;
  const double a = ev.minCoeff();
  if (!(a > -1.0)) throw SpectralError("alpha_min <= -1: assembly error");
  return a;
}

bool BdfIntervals::contains(double lambda, double tol) const {
  for (double p : points)
    if (std::abs(lambda - p) <= tol) return true;
  if (!bounded) return lambda <= minus_hi + tol || lambda >= plus_lo - tol;
  return (lambda >= minus_lo - tol && lambda <= minus_hi + tol) || (lambda >= plus_lo - tol && lambda <= plus_hi + tol);
}

BdfIntervals bdf_intervals(double amin) {
  BdfIntervals iv;
  const double s5 = std::sqrt(5.0), s2 = std::sqrt(2.0);
  iv.points = {(1.0 - s5) / 2.0, 1.0, (1.0 + s5) / 2.0};
  iv.minus_hi = (1.0 - s2) / 2.0;
  iv.plus_lo = (1.0 + s2) / 2.0;
  const double inf = std::numeric_limits<double>::infinity();
  if (!(amin > -1.0)) {
    iv.bounded = false;
    iv.minus_lo = -inf;
    iv.plus_hi = inf;
    return iv;
  }
  // Outer ends from sigma^2 <= 1/(1 + alpha_min), with sigma^2 an eigenvalue of Shat^{-1} S.
  // Squaring t here would undercut eigenvalues that actually occur once alpha_min > 0.
  const double t = 1.0 / (1.0 + amin);
  const double root = std::sqrt(1.0 + 4.0 * t);
  iv.minus_lo = 0.5 * (1.0 - root);
  iv.plus_hi = 0.5 * (1.0 + root);
  if (!std::isfinite(root)) {
    iv.bounded = false;
    iv.minus_lo = -inf;
    iv.plus_hi = inf;
  }
  return iv;
}

PencilSummary pencil_summary(const DiscreteProblem& pr, const ActiveSet& active) {
  const ScaledPencil sp = build_scaled_pencil(pr, active);
  PencilSummary s;
  const Vector lam = pencil_eigs(sp.H, sp.Hhat);
  s.lam_min = lam.minCoeff();
  s.lam_max = lam.maxCoeff();
  s.alpha_min = alpha_min(sp.G, sp.H);
  s.identity_error = (sp.Hhat - (sp.H + sp.G)).norm() / sp.Hhat.norm();
  return s;
}

IpfCheck ipf_spectrum_check(const DiscreteProblem& pr, const ActiveSet& active, double tol) {
  const Index n = pr.n(), na = active.n_active();
  const Index dim = 3 * n + na;
  if (n > 1000) throw std::invalid_argument("ipf_spectrum_check is meant for small instances");
  IpfCheck out;
  const NewtonSystem sys(pr, active);
  const DenseMatrix J = sys.assemble().to_dense();
  const SchurFactor f = build_schur_factor(pr, active);
  DenseMatrix PJ(dim, dim);
  for (Index j = 0; j < dim; ++j) PJ.col(j) = apply_ipf_inverse(f, J.col(j));

  Eigen::EigenSolver<DenseMatrix> es(PJ, false);
  if (es.info() != Eigen::Success) throw SpectralError("nonsymmetric eigensolver failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const double rho = ev.cwiseAbs().maxCoeff();
  out.max_imag = ev.imag().cwiseAbs().maxCoeff() / std::max(rho, 1.0);
  out.eig_real = ev.real();
  std::sort(out.eig_real.data(), out.eig_real.data() + out.eig_real.size());

  const ScaledPencil sp = build_scaled_pencil(pr, active);
  out.alpha_min = alpha_min(sp.G, sp.H);
  out.upper = 1.0 / (1.0 + out.alpha_min);
  for (Index i = 0; i < out.eig_real.size(); ++i) {
    const double l = out.eig_real[i];
    double v = std::abs(l - 1.0);
    if (l < 0.5) v = std::min(v, 0.5 - l);
    else if (l > out.upper) v = std::min(v, l - out.upper);
    else v = 0.0;
    out.membership_violation = std::max(out.membership_violation, v);
  }

  // Q = [I 0 -A^{-1}B'X2; 0 X1 X2], Lambda = diag(I, I, Lambda2),
  // Q^{-1} = [I A^{-1}B'X2 X2'Shat; 0 X1'Shat; 0 X2'Shat].
  const DenseSchurSet ds = build_true_schur_dense(pr, active);
  const auto blocks = dense_saddle_blocks(pr, active);
  const auto ges = gen_eig(ds.S, ds.Shat, Eigen::ComputeEigenvectors);
  const DenseMatrix X = ges.eigenvectors();
  const Vector lam = ges.eigenvalues();
  const Index ns = n + na;
  out.orthonormality_error = (X.transpose() * sym(ds.Shat) * X - DenseMatrix::Identity(ns, ns)).norm();
  std::vector<Index> one, rest;
  for (Index i = 0; i < ns; ++i) (std::abs(lam[i] - 1.0) <= 1e-12 ? one : rest).push_back(i);
  DenseMatrix X1(ns, static_cast<Index>(one.size())), X2(ns, static_cast<Index>(rest.size()));
  for (std::size_t i = 0; i < one.size(); ++i) X1.col(i) = X.col(one[i]);
  Vector lam2(static_cast<Index>(rest.size()));
  for (std::size_t i = 0; i < rest.size(); ++i) {
    X2.col(i) = X.col(rest[i]);
    lam2[i] = lam[rest[i]];
  }
  const Index n1 = X1.cols(), n2 = X2.cols();
  Vector ainv(2 * n);
  ainv << pr.m.cwiseInverse(), pr.m.cwiseInverse() / pr.nu();
  const DenseMatrix AiBtX2 = ainv.asDiagonal() * blocks.B.transpose() * X2;

  DenseMatrix Q = DenseMatrix::Zero(dim, dim);
  Q.topLeftCorner(2 * n, 2 * n).setIdentity();
  Q.block(2 * n, 2 * n, ns, n1) = X1;
  Q.block(0, 2 * n + n1, 2 * n, n2) = -AiBtX2;
  Q.block(2 * n, 2 * n + n1, ns, n2) = X2;
  DenseMatrix Qinv = DenseMatrix::Zero(dim, dim);
  Qinv.topLeftCorner(2 * n, 2 * n).setIdentity();
  Qinv.block(0, 2 * n, 2 * n, ns) = AiBtX2 * X2.transpose() * ds.Shat;
  Qinv.block(2 * n, 2 * n, n1, ns) = X1.transpose() * ds.Shat;
  Qinv.block(2 * n + n1, 2 * n, n2, ns) = X2.transpose() * ds.Shat;
  Vector diag = Vector::Ones(dim);
  diag.tail(n2) = lam2;
  out.reconstruction_error = (PJ - Q * diag.asDiagonal() * Qinv).norm() / PJ.norm();

  out.pass = out.max_imag <= tol && out.membership_violation <= tol && out.reconstruction_error <= tol &&
             out.orthonormality_error <= tol;
  return out;
}

BdfCheck bdf_spectrum_check(const DiscreteProblem& pr, const ActiveSet& active, double tol) {
  const Index n = pr.n(), na = active.n_active();
  if (n > 1000) throw std::invalid_argument("bdf_spectrum_check is meant for small instances");
  BdfCheck out;
  const DenseMatrix J = NewtonSystem(pr, active).assemble().to_dense();
  const DenseSchurSet ds = build_true_schur_dense(pr, active);
  DenseMatrix P = DenseMatrix::Zero(3 * n + na, 3 * n + na);
  P.topLeftCorner(n, n).diagonal() = pr.m;
  P.block(n, n, n, n).diagonal() = pr.nu() * pr.m;
  P.bottomRightCorner(n + na, n + na) = ds.Shat;
  out.eigenvalues = pencil_eigs(J, P);
  out.alpha_min = alpha_min(ds.G, ds.H);
  out.intervals = bdf_intervals(out.alpha_min);
  for (Index i = 0; i < out.eigenvalues.size(); ++i) {
    const double l = out.eigenvalues[i];
    if (out.intervals.contains(l, 0.0)) continue;
    double d = std::numeric_limits<double>::infinity();
    for (double p : out.intervals.points) d = std::min(d, std::abs(l - p));
    auto dist = [l](double lo, double hi) { return l < lo ? lo - l : (l > hi ? l - hi : 0.0); };
    d = std::min(d, dist(out.intervals.minus_lo, out.intervals.minus_hi));
    d = std::min(d, dist(out.intervals.plus_lo, out.intervals.plus_hi));
    out.membership_violation = std::max(out.membership_violation, d);
  }
  out.pass = out.membership_violation <= tol;
  return out;
}

ZetaBound zeta_bounds(const DiscreteProblem& pr, const ActiveSet& active) {
  const Index n = pr.n();
  if (n > kDenseLimit) throw std::invalid_argument("zeta_bounds: problem too large for dense SVD");
  const Vector pi = active.pi_diagonal();
  const Vector ms = pr.m.cwiseSqrt();
  const Vector mis = ms.cwiseInverse();
  const double sn = std::sqrt(pr.nu());
  ZetaBound z;
  if (pr.alpha_y() == 0.0 && pr.alpha_u() > 0.0) {
    DenseMatrix K = sn * pr.L.to_dense();
    K.diagonal() += pr.m.cwiseProduct(Vector::Ones(n) - pi);
    const DenseMatrix rhs = sn * pr.L.to_dense() * mis.asDiagonal();
    const DenseMatrix X = ms.asDiagonal() * Eigen::PartialPivLU<DenseMatrix>(K).solve(rhs);
    z.zeta = spectral_norm(X);
  } else if (pr.alpha_u() == 0.0 && pr.alpha_y() > 0.0) {
    const DenseMatrix F = sn * mis.asDiagonal() * pr.L.to_dense() * mis.asDiagonal();
    DenseMatrix K = F * (Vector::Ones(n) - pi).asDiagonal();
    K.diagonal().array() += 1.0;
    z.zeta = 1.0 / min_singular_value(K);
  } else {
    throw std::invalid_argument("zeta bound is defined for control or state constraints only");
  }
  z.bound = z.zeta * z.zeta + (1.0 + z.zeta) * (1.0 + z.zeta);
  z.lambda_max = pencil_summary(pr, active).lam_max;
  z.pass = z.lambda_max <= z.bound + 1e-8;
  return z;
}

LemmaResult lemma_f_property(const DenseMatrix& F, double tol) {
  if (F.rows() != F.cols()) throw DimensionError("F must be square");
  const Index n = F.rows();
  const DenseMatrix Fs = F + F.transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(Fs, Eigen::EigenvaluesOnly);
  if (n > 0 && es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("F + F' is not positive semidefinite");
  const DenseMatrix I = DenseMatrix::Identity(n, n);
  const Eigen::PartialPivLU<DenseMatrix> lu(F + I);
  const DenseMatrix A = lu.solve(F - I);
  const DenseMatrix T = lu.solve(Fs);                            // (F+I)^{-1}(F+F')
  const DenseMatrix B = lu.solve(T.transpose()).transpose();     // ... (F+I)^{-T}
  LemmaResult r;
  r.norm1 = spectral_norm(A);
  r.norm2 = spectral_norm(B);
  r.pass = r.norm1 <= 1.0 + tol && r.norm2 <= 0.5 + tol;
  return r;
}

LanczosResult lanczos_extremes(const std::function<Vector(const Vector&)>& apply, Index n, int maxit, double tol) {
  LanczosResult res;
  if (n == 0) return res;
  const int m = static_cast<int>(std::min<Index>(maxit, n));
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * dist(rng);
  v.normalize();
  DenseMatrix V(n, m + 1);
  V.col(0) = v;
  std::vector<double> alpha, beta;
  for (int j = 0; j < m; ++j) {
    Vector w = apply(V.col(j));
    const double a = V.col(j).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    const double b = w.norm();
    const int k = j + 1;
    res.iterations = k;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
    DenseMatrix T = DenseMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    es.compute(T);
    const Vector th = es.eigenvalues();
    res.min = th[0];
    res.max = th[k - 1];
    const double scale = std::max(std::abs(res.min), std::abs(res.max));
    const double rmin = std::abs(b * es.eigenvectors()(k - 1, 0));
    const double rmax = std::abs(b * es.eigenvectors()(k - 1, k - 1));
    if (b <= 1e-14 * scale || (k >= 4 && rmin <= tol * scale && rmax <= tol * scale)) break;
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  return res;
}

LanczosResult pencil_extremes_lanczos(const DiscreteProblem& pr, const ActiveSet& active) {
  const SchurFactor f = build_schur_factor(pr, active);
  const Vector& m = pr.m;
  const Vector ms = m.cwiseSqrt();
  const Vector minv = m.cwiseInverse();
  const Vector pim = active.pi_diagonal().cwiseProduct(m);
  const double nu = pr.nu(), ay = pr.alpha_y(), au = pr.alpha_u();
  const SparseMatrix Lt = pr.L.transpose();
  auto ss = [&](const Vector& x) {
    Vector out = nu * pr.L.multiply(minv.cwiseProduct(Lt.multiply(x))) + m.cwiseProduct(x);
    // W' x with W = alpha_y nu L M^{-1} - alpha_u I
    const Vector wt = ay * nu * minv.cwiseProduct(Lt.multiply(x)) - au * x;
    const Vector mid = pim.cwiseProduct(wt);
    out -= (ay * nu * pr.L.multiply(minv.cwiseProduct(mid)) - au * mid) / f.cprime;
    return out;
  };
  auto op = [&](const Vector& z) {
    const Vector x = f.l1_solver->solve_transpose(ms.cwiseProduct(z));
    return Vector(ms.cwiseProduct(f.l1_solver->solve(ss(x))));
  };
  return lanczos_extremes(op, pr.n());
}

SpectralReport eig_table_case(const EigTableCase& c, const SpectralOptions& opts) {
  const DiscreteProblem pr = preset_problem(c.problem, c.p, c.nu, c.beta, c.eps);
  std::vector<ActiveSet> sets;
  NewtonOptions nopts;
  const NewtonResult nr = newton_solve(pr, nopts, [&](int, const ActiveSet& a, const KktPoint&) { sets.push_back(a); });

  SpectralReport r;
  r.problem = c.problem;
  r.p = c.p;
  r.nu = c.nu;
  r.eps = c.eps;
  r.beta1 = velocity_label(c.beta);
  r.newton_iterations = nr.trace.nli();
  r.newton_converged = nr.trace.outcome == Outcome::Converged;
  if (sets.empty()) sets.push_back(ActiveSet::empty(pr.n()));

  std::size_t best = 0;
  PencilSummary summary;
  if (pr.n() <= opts.dense_every_iteration_limit) {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      PencilSummary s = pencil_summary(pr, sets[k]);
      if (k == 0 || s.lam_max > summary.lam_max) {
        summary = s;
        best = k;
      }
    }
  } else {
    r.lanczos_selection = true;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const double lm = pencil_extremes_lanczos(pr, sets[k]).max;
      if (lm > top) {
        top = lm;
        best = k;
      }
    }
    summary = pencil_summary(pr, sets[best]);
  }
  r.k = static_cast<int>(best);
  r.inactive = static_cast<Index>(sets[best].inactive.size());
  r.lam_min = summary.lam_min;
  r.lam_max = summary.lam_max;
  r.alpha_min = summary.alpha_min;
  r.bound_hi = 1.0 / (1.0 + summary.alpha_min);
  r.identity_error = summary.identity_error;
  r.bdf = bdf_intervals(summary.alpha_min);
  r.pass_lower = r.lam_min >= 0.5 - 1e-8;
  r.pass_upper = r.lam_max <= r.bound_hi + 1e-8;
  r.pass_identity = r.identity_error <= 1e-12;
  const bool cc_or_sc = pr.alpha_y() == 0.0 || pr.alpha_u() == 0.0;
  if (opts.check_zeta && cc_or_sc && pr.n() <= opts.dense_every_iteration_limit) {
    const ZetaBound z = zeta_bounds(pr, sets[best]);
    r.zeta = z.zeta;
    r.zeta_bound = z.bound;
    r.pass_zeta = z.pass;
  }
  return r;
}

std::vector<SpectralReport> eig_table_run(const std::vector<EigTableCase>& cases, const SpectralOptions& opts) {
  std::vector<SpectralReport> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(eig_table_case(c, opts));
  return out;
}

}  // namespace ocprec
