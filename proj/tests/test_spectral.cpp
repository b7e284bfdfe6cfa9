#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "ocprec/spectral.hpp"

using namespace ocprec;

namespace {

DenseMatrix random_matrix(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  DenseMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a;
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

// The active set after one Newton step from zero.
ActiveSet newton_set(const DiscreteProblem& pr, int k) {
  std::vector<ActiveSet> sets;
  NewtonOptions o;
  o.max_newton = k + 1;
  newton_solve(pr, o, [&](int, const ActiveSet& a, const KktPoint&) { sets.push_back(a); });
  return sets.at(std::min<std::size_t>(k, sets.size() - 1));
}

DiscreteProblem two_node_problem() {
  DiscreteProblem pr;
  pr.grid.n_h = 2;
  pr.L = SparseMatrix::identity(2);
  pr.m = Vector::Ones(2);
  pr.y_d = pr.a = pr.b = pr.d = Vector::Zero(2);
  pr.has_lower = pr.has_upper = {1, 1};
  pr.spec.nu = 1.0;
  pr.spec.alpha_u = 1.0;
  pr.spec.alpha_y = 0.0;
  return pr;
}

}  // namespace

TEST(PencilEigs, IdenticalMatricesGiveOnes) {
  DenseMatrix a = random_matrix(12, 1);
  a = a * a.transpose() + DenseMatrix::Identity(12, 12);
  const Vector ev = pencil_eigs(a, a);
  EXPECT_LE((ev - Vector::Ones(12)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(PencilEigs, TwoNodeClosedForm) {
  // M = I, L = I, nu = 1, Pi = diag(1, 0): SS = diag(1, 2), SShat = diag(1, 4).
  const auto pr = two_node_problem();
  const ActiveSet a = ActiveSet::from_indices(2, {0}, {});
  const auto set = build_true_schur_dense(pr, a);
  DenseMatrix SS(2, 2), SH(2, 2);
  SS << 1, 0, 0, 2;
  SH << 1, 0, 0, 4;
  EXPECT_LE((set.SS - SS).norm(), 1e-15);
  EXPECT_LE((set.SShat - SH).norm(), 1e-15);
  const Vector ev = pencil_eigs(set.SS, set.SShat);
  EXPECT_NEAR(ev[0], 0.5, 1e-15);
  EXPECT_NEAR(ev[1], 1.0, 1e-15);
  const auto s = pencil_summary(pr, a);
  EXPECT_NEAR(s.lam_min, 0.5, 1e-14);
  EXPECT_NEAR(s.lam_max, 1.0, 1e-14);
}

TEST(PencilEigs, RejectsIndefiniteRightMatrix) {
  DenseMatrix b = DenseMatrix::Identity(3, 3);
  b(2, 2) = -1.0;
  EXPECT_THROW(pencil_eigs(DenseMatrix::Identity(3, 3), b), SpectralError);
}

TEST(AlphaMin, SpecialCases) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2, Point{10, 0, 0});
  const auto full = build_scaled_pencil(pr, ActiveSet::full(pr.n()));
  EXPECT_NEAR(alpha_min(full.G, full.H), 0.0, 1e-14);
  const auto sym = preset_problem("CC-Pb1", 1, 1e-2);
  const auto empty = build_scaled_pencil(sym, ActiveSet::empty(sym.n()));
  EXPECT_GE(alpha_min(empty.G, empty.H), 0.0);
}

TEST(AlphaMin, BoundsThePencil) {
  for (const char* name : {"CC-Pb1", "CC-Pb2", "MC-Pb1", "SC-Pb1"})
    for (unsigned seed = 0; seed < 4; ++seed) {
      const auto pr = preset_problem(name, 1, 1e-4, Point{100, 0, 0}, 1e-2);
      const auto s = pencil_summary(pr, random_active(pr, seed));
      EXPECT_GT(s.alpha_min, -1.0);
      EXPECT_GE(s.lam_min, 0.5 - 1e-8) << name;
      EXPECT_LE(s.lam_max, 1.0 / (1.0 + s.alpha_min) + 1e-8) << name;
      EXPECT_LE(s.identity_error, 1e-12) << name;
    }
}

TEST(BdfIntervals, ClosedFormAndUnboundedGuard) {
  const auto iv = bdf_intervals(0.0);
  EXPECT_TRUE(iv.bounded);
  EXPECT_NEAR(iv.minus_lo, (1.0 - std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(iv.minus_hi, (1.0 - std::sqrt(2.0)) / 2.0, 1e-15);
  EXPECT_NEAR(iv.plus_lo, (1.0 + std::sqrt(2.0)) / 2.0, 1e-15);
  EXPECT_NEAR(iv.plus_hi, (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_TRUE(iv.contains(1.0, 0.0));
  EXPECT_FALSE(iv.contains(0.5, 1e-8));
  EXPECT_FALSE(bdf_intervals(-1.0).bounded);
  EXPECT_FALSE(bdf_intervals(-1.0 + 1e-300).bounded);
}

TEST(PreconditionedSpectra, IpfAndBdfOnNewtonSets) {
  for (const char* name : {"CC-Pb1", "MC-Pb1", "SC-Pb1"}) {
    const auto pr = preset_problem(name, 1, 1e-2, Point{10, 0, 0}, 0.1);
    for (int k : {0, 1}) {
      const ActiveSet a = newton_set(pr, k);
      const IpfCheck ipf = ipf_spectrum_check(pr, a);
      EXPECT_TRUE(ipf.pass) << name << " k=" << k << " imag " << ipf.max_imag << " member "
                            << ipf.membership_violation << " recon " << ipf.reconstruction_error;
      const BdfCheck bdf = bdf_spectrum_check(pr, a);
      EXPECT_TRUE(bdf.pass) << name << " k=" << k << " member " << bdf.membership_violation;
    }
  }
}

TEST(PreconditionedSpectra, FullActiveIpfIsIdentitySpectrum) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2);
  const IpfCheck ipf = ipf_spectrum_check(pr, ActiveSet::full(pr.n()));
  EXPECT_LE((ipf.eig_real - Vector::Ones(ipf.eig_real.size())).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(Zeta, ControlFullActiveIsOne) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-2, Point{10, 0, 0});
  const ZetaBound z = zeta_bounds(pr, ActiveSet::full(pr.n()));
  EXPECT_NEAR(z.zeta, 1.0, 1e-10);
  EXPECT_NEAR(z.bound, 5.0, 1e-9);
  EXPECT_NEAR(z.lambda_max, 1.0, 1e-10);
  EXPECT_TRUE(z.pass);
}

TEST(Zeta, StateConstraintsSmallNu) {
  const auto pr = preset_problem("SC-Pb1", 1, 1e-12);
  const ZetaBound z = zeta_bounds(pr, random_active(pr, 3));
  EXPECT_GE(z.zeta, 0.9);
  EXPECT_LE(z.zeta, 1.1);
  EXPECT_TRUE(z.pass);
}

TEST(Zeta, BoundHoldsOnMidNewtonSet) {
  const auto pr = preset_problem("CC-Pb1", 1, 1e-6);
  const ZetaBound z = zeta_bounds(pr, newton_set(pr, 2));
  EXPECT_TRUE(z.pass) << z.lambda_max << " vs " << z.bound;
}

TEST(Zeta, MixedCaseRejected) {
  const auto pr = preset_problem("MC-Pb1", 1, 1e-2, Point{0, 0, 0}, 0.1);
  EXPECT_THROW(zeta_bounds(pr, ActiveSet::empty(pr.n())), std::invalid_argument);
}

TEST(Lemma, ClosedForms) {
  const auto zero = lemma_f_property(DenseMatrix::Zero(5, 5));
  EXPECT_NEAR(zero.norm1, 1.0, 1e-14);
  EXPECT_NEAR(zero.norm2, 0.0, 1e-14);
  const auto id = lemma_f_property(DenseMatrix::Identity(5, 5));
  EXPECT_NEAR(id.norm1, 0.0, 1e-14);
  EXPECT_NEAR(id.norm2, 0.5, 1e-14);
  EXPECT_THROW(lemma_f_property(-DenseMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST(Lemma, RandomSkewPlusPsd) {
  for (unsigned t = 0; t < 20; ++t) {
    const DenseMatrix a = random_matrix(20, 100 + t), b = random_matrix(20, 200 + t);
    const DenseMatrix F = (a - a.transpose()) + 0.1 * b * b.transpose();
    const auto r = lemma_f_property(F);
    EXPECT_TRUE(r.pass) << r.norm1 << ' ' << r.norm2;
  }
}

TEST(Lanczos, MatchesDenseExtremes) {
  DenseMatrix a = random_matrix(60, 5);
  a = (0.5 * (a + a.transpose())).eval();
  const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a).eigenvalues();
  const auto r = lanczos_extremes([&](const Vector& x) { return Vector(a * x); }, 60);
  EXPECT_NEAR(r.min, ev.minCoeff(), 1e-8);
  EXPECT_NEAR(r.max, ev.maxCoeff(), 1e-8);
}

TEST(Lanczos, PencilExtremesAgreeWithDense) {
  const auto pr = preset_problem("MC-Pb1", 2, 1e-2, Point{10, 0, 0}, 0.1);
  const ActiveSet a = newton_set(pr, 1);
  const auto l = pencil_extremes_lanczos(pr, a);
  const auto d = pencil_summary(pr, a);
  EXPECT_NEAR(l.max, d.lam_max, 1e-6);
  EXPECT_NEAR(l.min, d.lam_min, 1e-6);
}

TEST(EigTable, TableOneFirstRow) {
  const auto r = eig_table_case({"CC-Pb1", 2, 1e-2, 0.0, Point{0, 0, 0}});
  EXPECT_NEAR(r.lam_min, 0.51, 0.05);
  EXPECT_NEAR(r.lam_max, 1.24, 0.05);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(r.zeta.has_value());
  EXPECT_FALSE(r.lanczos_selection);
}

TEST(EigTable, EmptySetSymmetricCase) {
  // Corollary-type check: beta = 0, no active indices.
  const auto pr = preset_problem("CC-Pb1", 2, 1e-2);
  const auto s = pencil_summary(pr, ActiveSet::empty(pr.n()));
  EXPECT_GE(s.lam_min, 0.5 - 1e-8);
  EXPECT_LE(s.lam_max, 1.0 + 1e-8);
}

TEST(EigTable, CsvColumns) {
  SpectralReport r;
  r.problem = "CC-Pb1";
  r.p = 2;
  r.nu = 0.01;
  r.beta1 = "0";
  r.lam_min = 0.5;
  r.lam_max = 1.2;
  std::ostringstream s;
  write_spectral_csv(s, {r});
  const std::string out = s.str();
  EXPECT_NE(out.find("problem,p,nu,eps,beta1,k,inactive,lam_min,lam_max,alpha_min,bound_hi,pass"), std::string::npos);
  EXPECT_NE(out.find("CC-Pb1,2,0.01,"), std::string::npos);
}
