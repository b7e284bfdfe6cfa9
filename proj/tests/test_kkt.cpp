#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <limits>
#include <random>

#include "ocprec/factorization.hpp"
#include "ocprec/kkt.hpp"

using namespace ocprec;

namespace {

Vector random_vector(Index n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

KktPoint random_point(Index n, unsigned seed) {
  return {random_vector(n, seed), random_vector(n, seed + 1), random_vector(n, seed + 2),
          random_vector(n, seed + 3)};
}

ActiveSet random_active(Index n, unsigned seed, double fraction = 0.4) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Index> up, lo;
  for (Index i = 0; i < n; ++i) {
    const double r = u(rng);
    if (r < fraction / 2)
      up.push_back(i);
    else if (r < fraction)
      lo.push_back(i);
  }
  return ActiveSet::from_indices(n, up, lo);
}

// Single-node problem with scalar M = m and L = l.
DiscreteProblem scalar_problem(double m, double l, double nu, double au, double ay) {
  DiscreteProblem pr;
  pr.grid.n_h = 1;
  pr.grid.n1d = 1;
  pr.L = SparseMatrix::from_triplets(1, 1, {{0, 0, l}});
  pr.m = Vector::Constant(1, m);
  pr.y_d = Vector::Constant(1, 0.7);
  pr.a = Vector::Constant(1, -1.0);
  pr.b = Vector::Constant(1, 2.0);
  pr.d = Vector::Zero(1);
  pr.has_lower = {1};
  pr.has_upper = {1};
  pr.spec.nu = nu;
  pr.spec.alpha_u = au;
  pr.spec.alpha_y = ay;
  return pr;
}

}  // namespace

TEST(Complementarity, ClosedForms) {
  const Vector a = Vector::Constant(1, -1.0), b = Vector::Constant(1, 1.0), z = Vector::Zero(1);
  const std::vector<char> yes{1}, no{0};
  EXPECT_EQ(complementarity(z, z, z, {a, b, yes, yes, 1.0, 0.0, 1.0})[0], 0.0);
  const Vector u = Vector::Constant(1, 2.0), mu = Vector::Constant(1, 1.0);
  EXPECT_EQ(complementarity(u, z, mu, {a, b, no, yes, 1.0, 0.0, 1.0})[0], -1.0);
}

TEST(Complementarity, SetwiseForm) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2);
  KktPoint x = random_point(pr.n(), 40);
  x.u.array() += 1.0;
  x.mu *= 2.0;
  const ActiveSet s = active_sets(x, pr);
  const Vector C = kkt_residual(x, pr).tail(pr.n());
  for (Index i : s.inactive) EXPECT_EQ(C[i], x.mu[i]) << i;
  for (Index i : s.upper) EXPECT_NEAR(C[i], -(x.u[i] - pr.b[i]), 1e-14) << i;
  for (Index i : s.lower) EXPECT_NEAR(C[i], -(x.u[i] - pr.a[i]), 1e-14) << i;
  EXPECT_FALSE(s.upper.empty());
  EXPECT_FALSE(s.lower.empty());
}

TEST(ActiveSets, ZeroStart) {
  for (const char* name : {"CC-Pb1", "MC-Pb1", "SC-Pb1"}) {
    const auto pr = preset_problem(name, 1, 1e-2, Point{0, 0, 0}, 0.1);
    EXPECT_EQ(active_sets(KktPoint::zeros(pr.n()), pr).n_active(), 0) << name;
  }
  // CC-Pb2 has a > 0 everywhere, so u = 0 violates the lower bound at every node.
  const auto pr = preset_problem("CC-Pb2", 1, 1e-2);
  const ActiveSet s = active_sets(KktPoint::zeros(pr.n()), pr);
  EXPECT_EQ(static_cast<Index>(s.lower.size()), pr.n());
  EXPECT_TRUE(s.upper.empty());
}

TEST(ActiveSets, StrictInequalityAndTies) {
  auto pr = scalar_problem(1.0, 1.0, 1.0, 1.0, 0.0);
  KktPoint x = KktPoint::zeros(1);
  x.u[0] = 2.0;  // on the upper bound
  x.mu[0] = 2.0;
  EXPECT_EQ(active_sets(x, pr).upper.size(), 1u);
  x.u[0] = 3.0;
  x.mu[0] = -1.0;  // mu + c(u - b) = 0 exactly
  const ActiveSet tie = active_sets(x, pr);
  EXPECT_EQ(tie.n_active(), 0);
  EXPECT_EQ(tie.inactive.size(), 1u);
}

TEST(ActiveSets, UnboundedBelowNeverLowerActive) {
  const auto pr = preset_problem("MC-Pb1", 1, 1e-2, Point{0, 0, 0}, 0.1);
  KktPoint x = KktPoint::zeros(pr.n());
  x.mu = Vector::Constant(pr.n(), -1e6);
  const ActiveSet s = active_sets(x, pr);
  EXPECT_TRUE(s.lower.empty());
  EXPECT_EQ(s.n_active(), 0);
}

TEST(ActiveSets, PartitionInvariants) {
  const ActiveSet s = random_active(50, 3);
  std::vector<int> seen(50, 0);
  for (Index i : s.upper) ++seen[i];
  for (Index i : s.lower) ++seen[i];
  for (Index i : s.inactive) ++seen[i];
  for (int c : seen) EXPECT_EQ(c, 1);
  EXPECT_TRUE(std::is_sorted(s.active.begin(), s.active.end()));
  EXPECT_THROW(ActiveSet::from_indices(5, {1, 2}, {2}), std::invalid_argument);
  EXPECT_THROW(ActiveSet::from_indices(5, {7}, {}), std::invalid_argument);
}

TEST(KktResidual, ZeroPoint) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2);
  const Vector F = kkt_residual(KktPoint::zeros(pr.n()), pr);
  const Index n = pr.n();
  EXPECT_LE((F.head(n) + pr.m.cwiseProduct(pr.y_d)).norm(), 0.0);
  EXPECT_EQ(F.tail(3 * n).norm(), 0.0);
}

TEST(KktResidual, LinearBlocksMatchJacobianColumns) {
  const auto pr = preset_problem("MC-Pb1", 1, 1e-2, Point{10, 0, 0}, 0.1);
  const Index n = pr.n();
  const ActiveSet full = ActiveSet::full(n);
  const NewtonSystem sys(pr, full);
  const DenseMatrix J = sys.assemble().to_dense();
  const KktPoint x = random_point(n, 50);
  const Vector F0 = kkt_residual(x, pr);
  for (Index j : {Index{0}, Index{5}, n + 3, 2 * n + 7, 3 * n + 2}) {
    KktPoint xp = x;
    const double delta = 0.37;
    if (j < n)
      xp.y[j] += delta;
    else if (j < 2 * n)
      xp.u[j - n] += delta;
    else if (j < 3 * n)
      xp.p[j - 2 * n] += delta;
    else
      xp.mu[j - 3 * n] += delta;
    const Vector dF = (kkt_residual(xp, pr) - F0).head(3 * n) / delta;
    EXPECT_LE((dF - J.col(j).head(3 * n)).norm(), 1e-12 * (1.0 + J.col(j).norm())) << j;
  }
}

TEST(KktResidual, UnconstrainedExactSolveHasZeroResidual) {
  auto pr = preset_problem("CC-Pb1", 1, 1e-2);
  std::fill(pr.has_lower.begin(), pr.has_lower.end(), 0);
  std::fill(pr.has_upper.begin(), pr.has_upper.end(), 0);
  const NewtonSystem sys(pr, ActiveSet::empty(pr.n()));
  const DenseMatrix J = sys.assemble().to_dense();
  const Vector x = J.partialPivLu().solve(sys.rhs());
  const Vector F = kkt_residual(expand_solution(x, sys.active()), pr);
  EXPECT_LE(F.norm(), 1e-10);
}

TEST(NewtonSystem, EmptyActiveSetIsThreeBySaddle) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2, Point{10, 0, 0});
  const Index n = pr.n();
  const NewtonSystem sys(pr, ActiveSet::empty(n));
  EXPECT_EQ(sys.dim(), 3 * n);
  const DenseMatrix J = sys.assemble().to_dense();
  const DenseMatrix L = pr.L.to_dense();
  DenseMatrix ref = DenseMatrix::Zero(3 * n, 3 * n);
  const DenseMatrix M = pr.m.asDiagonal();
  ref.block(0, 0, n, n) = M;
  ref.block(0, 2 * n, n, n) = L.transpose();
  ref.block(n, n, n, n) = pr.nu() * M;
  ref.block(n, 2 * n, n, n) = -M;
  ref.block(2 * n, 0, n, n) = L;
  ref.block(2 * n, n, n, n) = -M;
  EXPECT_EQ((J - ref).norm(), 0.0);
  Vector rhs = Vector::Zero(3 * n);
  rhs.head(n) = pr.m.cwiseProduct(pr.y_d);
  EXPECT_EQ((sys.rhs() - rhs).norm(), 0.0);
}

TEST(NewtonSystem, ScalarInstanceMatchesExplicitMatrix) {
  const double m = 0.5, l = 3.0, nu = 0.1;
  for (auto [au, ay] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{0.2, 1.0}}) {
    const auto pr = scalar_problem(m, l, nu, au, ay);
    const NewtonSystem sys(pr, ActiveSet::from_indices(1, {0}, {}));
    DenseMatrix J(4, 4);
    J << m, 0, l, ay,  //
        0, nu * m, -m, au,  //
        l, -m, 0, 0,  //
        ay, au, 0, 0;
    EXPECT_EQ((sys.assemble().to_dense() - J).norm(), 0.0);
    const Vector x = random_vector(4, 60);
    EXPECT_LE((sys.apply(x) - J * x).norm(), 1e-15);
    Vector f(4);
    f << m * 0.7, 0, 0, 2.0;
    EXPECT_EQ((sys.rhs() - f).norm(), 0.0);
  }
  const auto pr = scalar_problem(m, l, nu, 1.0, 0.0);
  EXPECT_EQ(NewtonSystem(pr, ActiveSet::from_indices(1, {}, {0})).rhs()[3], -1.0);
}

TEST(NewtonSystem, OperatorMatchesAssembledAndIsSymmetric) {
  const auto pr = preset_problem("MC-Pb1", 1, 1e-4, Point{100, 0, 0}, 1e-2);
  const NewtonSystem sys(pr, random_active(pr.n(), 70));
  const SparseMatrix J = sys.assemble();
  const DenseMatrix Jd = J.to_dense();
  EXPECT_LE((Jd - Jd.transpose()).norm(), 0.0);
  for (unsigned s = 0; s < 3; ++s) {
    const Vector x = random_vector(sys.dim(), 80 + s), z = random_vector(sys.dim(), 90 + s);
    const Vector Jx = sys.apply(x);
    EXPECT_LE((Jx - J.multiply(x)).norm(), 1e-13 * Jx.norm());
    EXPECT_NEAR(Jx.dot(z), x.dot(sys.apply_adjoint(z)), 1e-12 * Jx.norm() * z.norm());
  }
}

TEST(ExpandSolution, ScatterAndRoundTrip) {
  const Index n = 27;
  const ActiveSet none = ActiveSet::empty(n);
  EXPECT_EQ(expand_solution(random_vector(3 * n, 1), none).mu.norm(), 0.0);
  const ActiveSet all = ActiveSet::full(n);
  const Vector xa = random_vector(4 * n, 2);
  EXPECT_EQ(expand_solution(xa, all).mu, xa.tail(n));
  const ActiveSet s = random_active(n, 3);
  const Vector xr = random_vector(3 * n + s.n_active(), 4);
  EXPECT_EQ(reduce_point(expand_solution(xr, s), s), xr);
  EXPECT_THROW(expand_solution(Vector::Zero(3 * n), s), DimensionError);
}

TEST(NewtonSystem, FixedActiveSetStepIsKktPoint) {
  // Solve with the set the solution itself predicts: residual vanishes.
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2);
  ActiveSet s = ActiveSet::empty(pr.n());
  for (int it = 0; it < 20; ++it) {
    const NewtonSystem sys(pr, s);
    const Factorization f(sys.assemble());
    const KktPoint x = expand_solution(f.solve(sys.rhs()), s);
    const ActiveSet next = active_sets(x, pr);
    if (next == s) {
      EXPECT_LE(kkt_residual(x, pr).norm(), 1e-8);
      return;
    }
    s = next;
  }
  FAIL() << "active set did not settle";
}

TEST(NewtonSystem, StepIndependentOfC) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2, Point{10, 0, 0});
  const ActiveSet s = random_active(pr.n(), 5);
  // c enters only through the active set; fix the set and the step must agree.
  std::vector<Vector> steps;
  for (double c : {0.5, 1.0, 2.0}) {
    auto prc = pr;
    prc.spec.c = c;
    const NewtonSystem sys(prc, s);
    steps.push_back(Factorization(sys.assemble()).solve(sys.rhs()));
  }
  EXPECT_LE((steps[0] - steps[1]).norm(), 1e-8 * steps[1].norm());
  EXPECT_LE((steps[2] - steps[1]).norm(), 1e-8 * steps[1].norm());
}
