#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ocprec/factorization.hpp"
#include "ocprec/schur.hpp"
#include "ocprec/schur_dense.hpp"

using namespace ocprec;

namespace {

Vector random_vector(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

ActiveSet random_active(const DiscreteProblem& pr, unsigned seed, double fraction = 0.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Index> up, lo;
  for (Index i = 0; i < pr.n(); ++i) {
    const double r = u(rng);
    if (r < fraction / 2 && pr.has_upper[i])
      up.push_back(i);
    else if (r < fraction && pr.has_lower[i])
      lo.push_back(i);
  }
  return ActiveSet::from_indices(pr.n(), up, lo);
}

double rel_fro(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).norm() / b.norm(); }

DiscreteProblem problem_of(const std::string& name, int p, double nu) {
  return preset_problem(name, p, nu, Point{10, 0, 0}, name == "MC-Pb1" ? 0.1 : 0.0);
}

// Dense P^IPF = [A B'; B B A^{-1} B' - Shat] and P^BDF = blkdiag(A, Shat).
struct DensePrecs {
  DenseMatrix ipf, bdf;
};

DensePrecs dense_preconditioners(const DiscreteProblem& pr, const ActiveSet& s) {
  const auto blocks = dense_saddle_blocks(pr, s);
  const auto set = build_true_schur_dense(pr, s);
  const Index n2 = blocks.A.rows(), m2 = blocks.B.rows();
  const DenseMatrix Ainv = blocks.A.diagonal().cwiseInverse().asDiagonal();
  DensePrecs out;
  out.ipf = DenseMatrix::Zero(n2 + m2, n2 + m2);
  out.ipf.topLeftCorner(n2, n2) = blocks.A;
  out.ipf.topRightCorner(n2, m2) = blocks.B.transpose();
  out.ipf.bottomLeftCorner(m2, n2) = blocks.B;
  out.ipf.bottomRightCorner(m2, m2) = blocks.B * Ainv * blocks.B.transpose() - set.Shat;
  out.bdf = DenseMatrix::Zero(n2 + m2, n2 + m2);
  out.bdf.topLeftCorner(n2, n2) = blocks.A;
  out.bdf.bottomRightCorner(m2, m2) = set.Shat;
  return out;
}

}  // namespace

TEST(Gammas, ClosedForms) {
  auto [a1, a2] = gammas(0.3, 1.0, 0.0);
  EXPECT_EQ(a1, 0.0);
  EXPECT_EQ(a2, 1.0);
  auto [b1, b2] = gammas(1e-4, 1e-2, 1.0);
  EXPECT_NEAR(b1, 0.5, 1e-15);
  EXPECT_NEAR(b2, 0.5, 1e-15);
  auto [c1, c2] = gammas(1e-6, 0.0, 1.0);
  EXPECT_EQ(c1, 1.0);
  EXPECT_EQ(c2, 0.0);
  auto [d1, d2] = gammas(0.7, 0.3, 2.0);
  EXPECT_NEAR(d1 + d2, 1.0, 1e-16);
  EXPECT_THROW(gammas(1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(gammas(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Gammas, SquareRootIdentity) {
  for (auto [nu, au, ay] : {std::tuple{1e-2, 0.1, 1.0}, std::tuple{1e-6, 1.0, 0.0}, std::tuple{0.5, 0.3, 0.8}}) {
    const auto [g1, g2] = gammas(nu, au, ay);
    for (double pi : {0.0, 1.0}) {
      const double lhs = std::sqrt(1.0 - g1 * pi) * std::sqrt(1.0 - g2 * pi);
      const double rhs = std::sqrt(g1 * g2) * pi + (1.0 - pi);
      EXPECT_NEAR(lhs, rhs, 1e-15);
    }
  }
}

TEST(L1, SpecialCases) {
  const auto cc = problem_of("CC-Pb1", 1, 1e-2);
  const DenseMatrix L = cc.L.to_dense();
  const DenseMatrix M = cc.m.asDiagonal();
  const double s = std::sqrt(cc.nu());
  EXPECT_LE((build_l1(cc, ActiveSet::empty(cc.n())).to_dense() - (s * L + M)).norm(), 1e-14 * L.norm());

  const ActiveSet a = random_active(cc, 1);
  const DenseMatrix ipi = (Vector::Ones(cc.n()) - a.pi_diagonal()).asDiagonal();
  EXPECT_LE((build_l1(cc, a).to_dense() - (s * L + ipi * M)).norm(), 1e-14 * L.norm());

  const auto sc = problem_of("SC-Pb1", 1, 1e-2);
  const ActiveSet b = random_active(sc, 2);
  const DenseMatrix ipb = (Vector::Ones(sc.n()) - b.pi_diagonal()).asDiagonal();
  EXPECT_LE((build_l1(sc, b).to_dense() - (s * sc.L.to_dense() * ipb + DenseMatrix(sc.m.asDiagonal()))).norm(),
            1e-14 * L.norm());
}

TEST(L1, MixedCaseEntrywise) {
  const double eps = 0.05, nu = 1e-2, gamma = eps * eps / nu;
  const auto mc = preset_problem("MC-Pb1", 1, nu, Point{0, 0, 0}, eps);
  const ActiveSet a = ActiveSet::from_indices(mc.n(), {0, 1, 13}, {});
  const SparseMatrix L1 = build_l1(mc, a);
  for (Index i : {Index{0}, Index{1}, Index{2}, Index{13}}) {
    for (Index j : {Index{0}, Index{1}, Index{2}, Index{13}}) {
      const double pj = a.is_active(j) ? 1.0 : 0.0;
      double ref = std::sqrt(nu) * mc.L.coeff(i, j) * std::sqrt(1.0 - pj / (1.0 + gamma));
      if (i == j) ref += std::sqrt(1.0 - gamma * pj / (1.0 + gamma)) * mc.m[i];
      EXPECT_NEAR(L1.coeff(i, j), ref, 1e-14 * std::abs(mc.L.coeff(i, i))) << i << ',' << j;
    }
  }
}

TEST(SchurFactor, FieldsAndTrailingDiagonal) {
  const auto mc = problem_of("MC-Pb1", 1, 1e-2);
  const ActiveSet a = random_active(mc, 3);
  const SchurFactor f = build_schur_factor(mc, a);
  EXPECT_NEAR(f.gamma1 + f.gamma2, 1.0, 1e-15);
  EXPECT_EQ(f.nu_scale, 1.0 / mc.nu());
  EXPECT_EQ(f.coupling.rows(), mc.n());
  EXPECT_EQ(f.coupling.cols(), a.n_active());
  EXPECT_GT(f.trailing_diag.minCoeff(), 0.0);
  const auto set = build_true_schur_dense(mc, a);
  EXPECT_LE((DenseMatrix(f.coupling.to_dense()) - set.R.topRightCorner(mc.n(), a.n_active())).norm(),
            1e-13 * set.R.norm());
}

TEST(SchurDense, FactorizedTrueSchur) {
  // S = (1/nu) R blkdiag(SS, D) R'
  for (const char* name : {"CC-Pb1", "MC-Pb1", "SC-Pb1"}) {
    const auto pr = problem_of(name, 1, 1e-3);
    const ActiveSet a = random_active(pr, 4);
    const auto set = build_true_schur_dense(pr, a);
    const Index n = pr.n(), na = a.n_active();
    DenseMatrix mid = DenseMatrix::Zero(n + na, n + na);
    mid.topLeftCorner(n, n) = set.SS;
    mid.bottomRightCorner(na, na) = set.D;
    EXPECT_LE(rel_fro(set.R * mid * set.R.transpose() / pr.nu(), set.S), 1e-12) << name;
  }
}

TEST(SchurDense, HatIdentity) {
  for (const char* name : {"CC-Pb1", "CC-Pb2", "MC-Pb1", "SC-Pb1"})
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto pr = problem_of(name, 1, 1e-4);
      const auto sp = build_scaled_pencil(pr, random_active(pr, 10 + seed));
      EXPECT_LE((sp.Hhat - (sp.H + sp.G)).norm(), 1e-12 * sp.Hhat.norm()) << name;
    }
}

TEST(SchurDense, FullActiveCollapse) {
  for (const char* name : {"CC-Pb1", "MC-Pb1", "SC-Pb1"})
    for (int p : {1, 2}) {
      const auto pr = problem_of(name, p, 1e-2);
      const auto set = build_true_schur_dense(pr, ActiveSet::full(pr.n()));
      EXPECT_LE(rel_fro(set.Shat, set.S), 1e-12) << name << " p=" << p;
      EXPECT_LE(set.G.norm(), 1e-14 * set.H.norm());
    }
}

TEST(ShatInverse, EmptyActiveSet) {
  const auto pr = problem_of("CC-Pb1", 1, 1e-2);
  const SchurFactor f = build_schur_factor(pr, ActiveSet::empty(pr.n()));
  const Vector r = random_vector(pr.n(), 5);
  const DenseMatrix L1 = f.L1.to_dense();
  const Vector ref = pr.nu() * L1.transpose().partialPivLu().solve(pr.m.cwiseProduct(L1.partialPivLu().solve(r)));
  EXPECT_LE((apply_shat_inverse(f, r) - ref).norm(), 1e-12 * ref.norm());
}

TEST(ShatInverse, RoundTripAgainstDenseShat) {
  for (const char* name : {"CC-Pb1", "CC-Pb2", "MC-Pb1", "SC-Pb1"}) {
    const auto pr = problem_of(name, 1, 1e-2);
    const ActiveSet a = random_active(pr, 6);
    const SchurFactor f = build_schur_factor(pr, a);
    const auto set = build_true_schur_dense(pr, a);
    const Vector r = random_vector(pr.n() + a.n_active(), 7);
    const Vector back = set.Shat * apply_shat_inverse(f, r);
    EXPECT_LE((back - r).norm(), 1e-10 * r.norm()) << name;
  }
}

TEST(ShatInverse, ScalarClosedForm) {
  // n = 1, A = {1}, control constraints: Shat = S = [l^2/m + m/nu, -1/nu; -1/nu, 1/(nu m)].
  const double m = 0.5, l = 3.0, nu = 0.2;
  DiscreteProblem pr;
  pr.grid.n_h = 1;
  pr.L = SparseMatrix::from_triplets(1, 1, {{0, 0, l}});
  pr.m = Vector::Constant(1, m);
  pr.y_d = pr.a = pr.b = pr.d = Vector::Zero(1);
  pr.has_lower = pr.has_upper = {1};
  pr.spec.nu = nu;
  pr.spec.alpha_u = 1.0;
  pr.spec.alpha_y = 0.0;
  const SchurFactor f = build_schur_factor(pr, ActiveSet::full(1));
  const double det = l * l / (nu * m * m);
  DenseMatrix Sinv(2, 2);
  Sinv << 1.0 / (nu * m), 1.0 / nu, 1.0 / nu, l * l / m + m / nu;
  Sinv /= det;
  const Vector r(Vector::LinSpaced(2, 1.0, -2.0));
  EXPECT_LE((apply_shat_inverse(f, r) - Sinv * r).norm(), 1e-13 * (Sinv * r).norm());
}

TEST(Preconditioners, MatchDenseInverses) {
  for (const char* name : {"CC-Pb1", "MC-Pb1", "SC-Pb1"}) {
    const auto pr = problem_of(name, 1, 1e-2);
    const ActiveSet a = random_active(pr, 8);
    const SchurFactor f = build_schur_factor(pr, a);
    const auto P = dense_preconditioners(pr, a);
    const Vector r = random_vector(3 * pr.n() + a.n_active(), 9);
    const Vector zi = apply_ipf_inverse(f, r), zb = apply_bdf_inverse(f, r);
    EXPECT_LE((P.ipf * zi - r).norm(), 1e-10 * r.norm()) << name;
    EXPECT_LE((P.bdf * zb - r).norm(), 1e-10 * r.norm()) << name;
    const Vector ref = P.ipf.partialPivLu().solve(r);
    EXPECT_LE((zi - ref).norm(), 1e-10 * ref.norm()) << name;
  }
}

TEST(Preconditioners, IpfOnRangeOfFirstBlock) {
  // r = (r1, B A^{-1} r1) makes t2 = 0, so z = (A^{-1} r1, 0).
  const auto pr = problem_of("MC-Pb1", 1, 1e-2);
  const ActiveSet a = random_active(pr, 10);
  const SchurFactor f = build_schur_factor(pr, a);
  const auto blocks = dense_saddle_blocks(pr, a);
  const Vector r1 = random_vector(2 * pr.n(), 11);
  const Vector t1 = r1.cwiseQuotient(blocks.A.diagonal());
  Vector r(3 * pr.n() + a.n_active());
  r << r1, blocks.B * t1;
  const Vector z = apply_ipf_inverse(f, r);
  EXPECT_LE((z.head(2 * pr.n()) - t1).norm(), 1e-10 * t1.norm());
  EXPECT_LE(z.tail(pr.n() + a.n_active()).norm(), 1e-10 * t1.norm());
}

TEST(Preconditioners, BdfIsSymmetric) {
  const auto pr = problem_of("CC-Pb1", 1, 1e-4);
  const ActiveSet a = random_active(pr, 12);
  auto f = std::make_shared<const SchurFactor>(build_schur_factor(pr, a));
  const DenseMatrix B = to_dense(bdf_operator(f));
  EXPECT_LE((B - B.transpose()).norm(), 1e-10 * B.norm());
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<DenseMatrix>(0.5 * (B + B.transpose())).eigenvalues().minCoeff(), 0.0);
}

namespace {

struct DenseBt {
  DenseMatrix K, P, H;
};

DenseBt dense_bt(const DiscreteProblem& pr, const ActiveSet& a, double a0, double a1) {
  const Index n = pr.n();
  const DenseMatrix M = pr.m.asDiagonal();
  const DenseMatrix L = pr.L.to_dense();
  const DenseMatrix IPi = (Vector::Ones(n) - a.pi_diagonal()).asDiagonal();
  DenseBt d;
  d.K = DenseMatrix::Zero(3 * n, 3 * n);
  d.K.block(0, 0, n, n) = M;
  d.K.block(0, 2 * n, n, n) = -L.transpose();
  d.K.block(n, n, n, n) = pr.nu() * M;
  d.K.block(n, 2 * n, n, n) = IPi * M;
  d.K.block(2 * n, 0, n, n) = -L;
  d.K.block(2 * n, n, n, n) = M * IPi;
  const DenseMatrix S0 = L * M.inverse() * L.transpose();
  d.P = DenseMatrix::Zero(3 * n, 3 * n);
  d.P.block(0, 0, n, n) = a0 * M;
  d.P.block(n, n, n, n) = a1 * pr.nu() * M;
  d.P.block(2 * n, 0, n, 2 * n) = d.K.block(2 * n, 0, n, 2 * n);
  d.P.block(2 * n, 2 * n, n, n) = -S0;
  d.H = DenseMatrix::Zero(3 * n, 3 * n);
  d.H.block(0, 0, n, n) = (1.0 - a0) * M;
  d.H.block(n, n, n, n) = (1.0 - a1) * pr.nu() * M;
  d.H.block(2 * n, 2 * n, n, n) = S0;
  return d;
}

}  // namespace

TEST(BlockTriangular, MatchesDenseBlocks) {
  const auto pr = problem_of("CC-Pb1", 1, 1e-2);
  const ActiveSet a = random_active(pr, 13);
  const BtSystem bt(pr, a, std::make_shared<Factorization>(pr.L));
  const auto d = dense_bt(pr, a, 0.9, 0.9);
  const Vector x = random_vector(3 * pr.n(), 14);
  EXPECT_LE((bt.apply(x) - d.K * x).norm(), 1e-12 * (d.K * x).norm());
  EXPECT_LE((bt.apply_metric(x) - d.H * x).norm(), 1e-12 * (d.H * x).norm());
  const Vector z = apply_bt_preconditioner(bt, x);
  EXPECT_LE((d.P * z - x).norm(), 1e-10 * x.norm());
}

TEST(BlockTriangular, UnitBlocksClosedForm) {
  // M = I, L = I, nu = 1, no active set, so S0 = I and B = [-1 1].
  DiscreteProblem pr;
  pr.grid.n_h = 1;
  pr.L = SparseMatrix::identity(1);
  pr.m = Vector::Ones(1);
  pr.y_d = pr.a = pr.b = pr.d = Vector::Zero(1);
  pr.has_lower = pr.has_upper = {1};
  pr.spec.nu = 1.0;
  const BtSystem bt(pr, ActiveSet::empty(1), std::make_shared<Factorization>(pr.L), 0.5, 0.8);
  const Vector r(Vector::LinSpaced(3, 1.0, 3.0));
  const double zy = 1.0 / 0.5, zu = 2.0 / 0.8;
  const Vector z = bt.apply_prec_inverse(r);
  EXPECT_NEAR(z[0], zy, 1e-15);
  EXPECT_NEAR(z[1], zu, 1e-15);
  EXPECT_NEAR(z[2], -zy + zu - 3.0, 1e-14);
}

TEST(BlockTriangular, LiftedSolveSolvesNewtonSystem) {
  const auto pr = problem_of("CC-Pb1", 1, 1e-3);
  const ActiveSet a = random_active(pr, 15);
  const BtSystem bt(pr, a, std::make_shared<Factorization>(pr.L));
  const DenseMatrix K = dense_bt(pr, a, 0.9, 0.9).K;
  const Vector z = K.partialPivLu().solve(bt.rhs());
  const NewtonSystem sys(pr, a);
  const Vector x = bt.unlift(z);
  EXPECT_LE((sys.apply(x) - sys.rhs()).norm(), 1e-10 * sys.rhs().norm());
  EXPECT_LE((bt.unlift(bt.lift(x)) - x).norm(), 1e-12 * x.norm());
}

TEST(BlockTriangular, RejectsNonControlConstraints) {
  const auto pr = problem_of("MC-Pb1", 1, 1e-2);
  EXPECT_THROW(BtSystem(pr, ActiveSet::empty(pr.n()), std::make_shared<Factorization>(pr.L)), std::invalid_argument);
  const auto cc = problem_of("CC-Pb1", 1, 1e-2);
  EXPECT_THROW(BtSystem(cc, ActiveSet::empty(cc.n()), std::make_shared<Factorization>(cc.L), 1.0, 0.5),
               std::invalid_argument);
}
