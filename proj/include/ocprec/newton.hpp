#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ocprec/kkt.hpp"
#include "ocprec/schur.hpp"

namespace ocprec {

enum class Method { GmresIpf, MinresBdf, BpcgBt };
enum class Forcing { Exact, Inexact };
enum class Outcome { Converged, MaxIterations, LinearFailure };

std::string to_string(Method m);
std::string to_string(Forcing f);
std::string to_string(Outcome o);
Method parse_method(const std::string& s);
Forcing parse_forcing(const std::string& s);

struct NewtonOptions {
  Method method = Method::GmresIpf;
  Forcing forcing = Forcing::Exact;
  double tau1 = 1e-10;
  double tau2 = 1e-4;
  double tau3 = 1e-2;
  double tau_s = 1e-10;
  double tau_f = 1e-8;
  int max_newton = 200;
  int max_linear = 0;  // 0 selects 80 for GMRES, 1000 otherwise
  std::optional<double> c;  // overrides the problem's c
  InnerSolverPolicy inner;
  double bt_a0 = 0.9;
  double bt_a1 = 0.9;

  // tau_s = tau1 = 1e-12
  NewtonOptions& strict_safeguard() {
    tau_s = 1e-12;
    tau1 = 1e-12;
    return *this;
  }
  int linear_limit() const { return max_linear > 0 ? max_linear : (method == Method::GmresIpf ? 80 : 1000); }
  void validate() const;
};

double forcing_exact(int k, double tau1 = 1e-10);
double forcing_inexact(int k, double eta_prev, double f_norm, double tau2 = 1e-4, double tau3 = 1e-2);

struct NewtonRecord {
  int k = 0;  // active set A_k was computed from iterate k
  Index n_upper = 0;
  Index n_lower = 0;
  Index n_inactive = 0;
  double eta = 0.0;
  double linear_target = 0.0;
  int linear_iterations = 0;
  double linear_residual = 0.0;
  bool linear_converged = false;
  double f_norm = 0.0;  // ||F|| after the step
  double seconds = 0.0;
};

struct NewtonTrace {
  std::vector<NewtonRecord> records;
  Outcome outcome = Outcome::MaxIterations;
  bool any_linear_failure = false;
  double initial_f_norm = 0.0;
  double total_seconds = 0.0;

  int nli() const { return static_cast<int>(records.size()); }
  double mean_linear_iterations() const;
  double mean_linear_seconds() const;
};

struct NewtonResult {
  KktPoint point;
  NewtonTrace trace;
};

// Called with the iteration index, the active set and the point it came from.
using NewtonObserver = std::function<void(int k, const ActiveSet& active, const KktPoint& x)>;

Vector warm_start_map(const KktPoint& x_prev, const ActiveSet& active_new);

NewtonResult newton_solve(const DiscreteProblem& problem, const NewtonOptions& opts,
                          const NewtonObserver& observer = {});

}  // namespace ocprec
