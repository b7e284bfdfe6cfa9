#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ocprec/kkt.hpp"
#include "ocprec/newton.hpp"
#include "ocprec/schur_dense.hpp"

namespace ocprec {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Generalized eigenvalues of (S, Shat), Shat SPD, ascending.
Vector pencil_eigs(const DenseMatrix& S, const DenseMatrix& Shat);

// Smallest eigenvalue of the pencil (G, H), H SPD. Throws if it is not above -1.
double alpha_min(const DenseMatrix& G, const DenseMatrix& H);

struct BdfIntervals {
  bool bounded = true;
  double minus_lo = 0.0, minus_hi = 0.0;
  double plus_lo = 0.0, plus_hi = 0.0;
  std::vector<double> points;  // 1 and (1 +- sqrt 5)/2

  bool contains(double lambda, double tol) const;
};

BdfIntervals bdf_intervals(double alpha_min);

struct IpfCheck {
  Vector eig_real;         // eigenvalues of P^{-1} J, real parts ascending
  double max_imag = 0.0;   // relative to spectral radius
  double alpha_min = 0.0;
  double upper = 1.0;      // 1/(1 + alpha_min)
  double membership_violation = 0.0;
  double reconstruction_error = 0.0;  // ||P^{-1}J - Q Lambda Q^{-1}|| / ||P^{-1}J||
  double orthonormality_error = 0.0;  // ||X' Shat X - I||
  bool pass = false;
};

IpfCheck ipf_spectrum_check(const DiscreteProblem& problem, const ActiveSet& active, double tol = 1e-8);

struct BdfCheck {
  Vector eigenvalues;
  double alpha_min = 0.0;
  BdfIntervals intervals;
  double membership_violation = 0.0;
  bool pass = false;
};

BdfCheck bdf_spectrum_check(const DiscreteProblem& problem, const ActiveSet& active, double tol = 1e-8);

struct ZetaBound {
  double zeta = 0.0;
  double bound = 0.0;  // zeta^2 + (1 + zeta)^2
  double lambda_max = 0.0;
  bool pass = false;
};

// Control (alpha_y = 0) or state (alpha_u = 0) constraints only.
ZetaBound zeta_bounds(const DiscreteProblem& problem, const ActiveSet& active);

struct LemmaResult {
  double norm1 = 0.0;  // ||(F+I)^{-1}(F-I)||
  double norm2 = 0.0;  // ||(F+I)^{-1}(F+F')(F+I)^{-T}||
  bool pass = false;
};

LemmaResult lemma_f_property(const DenseMatrix& F, double tol = 1e-10);

// Extremes of (SS, SShat) for one active set, computed in the scaled form
// (H, Hhat) together with alpha_min of (G, H) and the identity Hhat = H + G.
struct PencilSummary {
  double lam_min = 0.0;
  double lam_max = 0.0;
  double alpha_min = 0.0;
  double identity_error = 0.0;  // ||Hhat - (H + G)||_F / ||Hhat||_F
};

PencilSummary pencil_summary(const DiscreteProblem& problem, const ActiveSet& active);

// Lanczos with full reorthogonalization on a symmetric operator.
struct LanczosResult {
  double min = 0.0;
  double max = 0.0;
  int iterations = 0;
};
LanczosResult lanczos_extremes(const std::function<Vector(const Vector&)>& apply, Index n, int maxit = 300,
                               double tol = 1e-10);

// Lanczos estimate of the extremes of (SS, SShat) through M^{1/2} L1^{-1} SS L1^{-T} M^{1/2}.
LanczosResult pencil_extremes_lanczos(const DiscreteProblem& problem, const ActiveSet& active);

struct EigTableCase {
  std::string problem;
  int p = 2;
  double nu = 1e-2;
  double eps = 0.0;
  Velocity beta = Point{0, 0, 0};
};

struct SpectralOptions {
  Index dense_every_iteration_limit = 1000;  // above this size, select k by Lanczos
  bool check_zeta = true;
};

struct SpectralReport {
  std::string problem;
  int p = 0;
  double nu = 0.0;
  double eps = 0.0;
  std::string beta1;
  int k = 0;
  Index inactive = 0;
  double lam_min = 0.0;
  double lam_max = 0.0;
  double alpha_min = 0.0;
  double bound_hi = 0.0;
  double identity_error = 0.0;
  std::optional<double> zeta;
  std::optional<double> zeta_bound;
  BdfIntervals bdf;
  int newton_iterations = 0;
  bool newton_converged = false;
  bool lanczos_selection = false;
  bool pass_lower = false;
  bool pass_upper = false;
  bool pass_identity = false;
  bool pass_zeta = true;
  bool pass() const { return pass_lower && pass_upper && pass_identity && pass_zeta; }
};

SpectralReport eig_table_case(const EigTableCase& c, const SpectralOptions& opts = {});
std::vector<SpectralReport> eig_table_run(const std::vector<EigTableCase>& cases, const SpectralOptions& opts = {});

void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& reports);

}  // namespace ocprec
