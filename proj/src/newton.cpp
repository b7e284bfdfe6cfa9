#include "ocprec/newton.hpp"

#include <chrono>
#include <memory>

#include "ocprec/krylov.hpp"

namespace ocprec {

std::string to_string(Method m) {
  switch (m) {
    case Method::GmresIpf: return "gmres-ipf";
    case Method::MinresBdf: return "minres-bdf";
    case Method::BpcgBt: return "bpcg-bt";
  }
  return "?";
}

std::string to_string(Forcing f) { return f == Forcing::Exact ? "exact" : "inexact"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "converged";
    case Outcome::MaxIterations: return "max_iterations";
    case Outcome::LinearFailure: return "linear_failure";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "gmres-ipf" || s == "gmres+ipf") return Method::GmresIpf;
  if (s == "minres-bdf" || s == "minres+bdf") return Method::MinresBdf;
  if (s == "bpcg-bt" || s == "bpcg+bt") return Method::BpcgBt;
  throw std::invalid_argument("unknown method: " + s);
}

Forcing parse_forcing(const std::string& s) {
  if (s == "exact") return Forcing::Exact;
  if (s == "inexact") return Forcing::Inexact;
  throw std::invalid_argument("unknown forcing: " + s);
}

void NewtonOptions::validate() const {
  for (double t : {tau1, tau2, tau3, tau_s, tau_f})
    if (!(t > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (max_newton < 1 || max_linear < 0) throw std::invalid_argument("iteration limits must be positive");
  if (c && !(*c > 0.0)) throw std::invalid_argument("c must be positive");
}

double forcing_exact(int /*k*/, double tau1) { return tau1; }

double forcing_inexact(int k, double eta_prev, double f_norm, double tau2, double tau3) {
  if (k < 0) throw std::invalid_argument("iteration index must be nonnegative");
  if (k == 0) return tau2;
  return std::min(eta_prev, tau3 * f_norm * f_norm);
}

double NewtonTrace::mean_linear_iterations() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.linear_iterations;
  return s / static_cast<double>(records.size());
}

double NewtonTrace::mean_linear_seconds() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.seconds;
  return s / static_cast<double>(records.size());
}

Vector warm_start_map(const KktPoint& x_prev, const ActiveSet& active_new) {
  // mu is zero off the previous active set, so gathering zeroes new entries.
  return reduce_point(x_prev, active_new);
}

NewtonResult newton_solve(const DiscreteProblem& pr, const NewtonOptions& opts, const NewtonObserver& observer) {
  opts.validate();
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const double c = opts.c.value_or(pr.spec.c);
  const int maxlin = opts.linear_limit();

  NewtonResult res{KktPoint::zeros(pr.n()), {}};
  NewtonTrace& tr = res.trace;
  KktPoint& x = res.point;

  std::shared_ptr<Factorization> l_factor;
  if (opts.method == Method::BpcgBt) l_factor = std::make_shared<Factorization>(pr.L);

  double f_norm = kkt_residual(x, pr, c).norm();
  tr.initial_f_norm = f_norm;
  double eta = 0.0;
  bool converged = f_norm <= opts.tau_f;
  bool aborted = false;

  for (int k = 0; k < opts.max_newton && !converged; ++k) {
    const auto t0 = clock::now();
    const ActiveSet active = active_sets(x, pr, c);
    if (observer) observer(k, active, x);

    eta = opts.forcing == Forcing::Exact ? forcing_exact(k, opts.tau1)
                                         : forcing_inexact(k, eta, f_norm, opts.tau2, opts.tau3);
    NewtonRecord rec;
    rec.k = k;
    rec.n_upper = static_cast<Index>(active.upper.size());
    rec.n_lower = static_cast<Index>(active.lower.size());
    rec.n_inactive = static_cast<Index>(active.inactive.size());
    rec.eta = eta;

    const NewtonSystem sys(pr, active);
    const Vector x0 = warm_start_map(x, active);
    Vector xr;
    try {
      if (opts.method == Method::BpcgBt) {
        const BtSystem bt(pr, active, l_factor, opts.bt_a0, opts.bt_a1);
        const Vector z0 = bt.lift(x0);
        const double r0 = (bt.apply(z0) - bt.rhs()).norm();
        rec.linear_target = std::max(opts.tau_s, eta * r0);
        auto kr = bpcg(bt.op(), bt.prec_inverse(), bt.metric(), bt.rhs(), z0, rec.linear_target, maxlin);
        xr = bt.unlift(kr.x);
        rec.linear_iterations = kr.stats.iterations;
        rec.linear_residual = kr.stats.final_residual();
        rec.linear_converged = kr.stats.converged;
      } else {
        auto factor = std::make_shared<const SchurFactor>(build_schur_factor(pr, active, opts.inner));
        const double r0 = (sys.apply(x0) - sys.rhs()).norm();
        rec.linear_target = std::max(opts.tau_s, eta * r0);
        KrylovResult kr = opts.method == Method::GmresIpf
                              ? gmres(sys.as_operator(), ipf_operator(factor), sys.rhs(), x0, rec.linear_target, maxlin)
                              : minres(sys.as_operator(), bdf_operator(factor), sys.rhs(), x0, rec.linear_target, maxlin);
        xr = std::move(kr.x);
        rec.linear_iterations = kr.stats.iterations;
        rec.linear_residual = kr.stats.final_residual();
        rec.linear_converged = kr.stats.converged;
      }
    } catch (const KrylovBreakdown&) {
      rec.linear_converged = false;
      rec.f_norm = f_norm;
      rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      tr.records.push_back(rec);
      tr.any_linear_failure = true;
      aborted = true;
      break;
    }
    if (!rec.linear_converged) tr.any_linear_failure = true;

    x = expand_solution(xr, active);
    f_norm = kkt_residual(x, pr, c).norm();
    rec.f_norm = f_norm;
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    tr.records.push_back(rec);
    converged = f_norm <= opts.tau_f;
  }

  if (converged)
    tr.outcome = Outcome::Converged;
  else if (aborted || tr.any_linear_failure)
    tr.outcome = Outcome::LinearFailure;
  else
    tr.outcome = Outcome::MaxIterations;
  tr.total_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return res;
}

}  // namespace ocprec
