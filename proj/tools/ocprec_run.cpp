// Parameter sweeps, spectral tables and performance profiles from the command line.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ocprec/experiments.hpp"
#include "ocprec/kkt.hpp"
#include "ocprec/spectral.hpp"

namespace fs = std::filesystem;
using namespace ocprec;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void export_matrices(const ExperimentConfig& cfg, const std::string& dir) {
  const auto cases = expand_cases(cfg);
  const auto& c = cases.front();
  const DiscreteProblem pr = preset_problem(c.problem, c.p, c.nu, c.beta, c.eps);
  fs::create_directories(dir);
  write_matrix_market((fs::path(dir) / "L.mtx").string(), pr.L);
  write_matrix_market((fs::path(dir) / "M.mtx").string(), SparseMatrix::diagonal(pr.m));
  const NewtonSystem sys(pr, ActiveSet::empty(pr.n()));
  write_matrix_market((fs::path(dir) / "J0.mtx").string(), sys.assemble());
  std::cerr << "wrote L.mtx, M.mtx, J0.mtx for " << c.problem << " p=" << c.p << " to " << dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-set Newton sweeps with Schur-complement preconditioners"};
  std::string config_path;
  std::vector<std::string> problems, levels, nus, betas, eps, methods;
  std::string forcing, out_dir, inner, export_dir;
  bool spectral = false, strict = false, profile = false;

  app.add_option("--config", config_path, "key = value config file; flags override its keys");
  app.add_option("--problem", problems, "CC-Pb1, CC-Pb2, MC-Pb1, SC-Pb1")->delimiter(',');
  app.add_option("--levels", levels, "grid levels p (n1d = 2^(p+1)-1)")->delimiter(',');
  app.add_option("--nu", nus, "regularization values")->delimiter(',');
  app.add_option("--beta1", betas, "convection: b1, b1;b2;b3 or rotational")->delimiter(',');
  app.add_option("--eps", eps, "MC weights alpha_u = eps")->delimiter(',');
  app.add_option("--method", methods, "gmres-ipf, minres-bdf, bpcg-bt")->delimiter(',');
  app.add_option("--forcing", forcing, "exact or inexact");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--inner", inner, "L1 solver: direct or mg");
  app.add_option("--export-mm", export_dir, "write L, M and J_0 of the first case in Matrix Market format");
  app.add_flag("--spectral", spectral, "tabulate extreme eigenvalues instead of timing runs");
  app.add_flag("--strict-safeguard", strict, "use tau_s = tau_1 = 1e-12");
  app.add_flag("--profile", profile, "also write a tcpu performance profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    if (!problems.empty()) apply_config_key(cfg, "problem", join(problems));
    if (!levels.empty()) apply_config_key(cfg, "levels", join(levels));
    if (!nus.empty()) apply_config_key(cfg, "nu", join(nus));
    if (!betas.empty()) apply_config_key(cfg, "beta1", join(betas));
    if (!eps.empty()) apply_config_key(cfg, "eps", join(eps));
    if (!methods.empty()) apply_config_key(cfg, "method", join(methods));
    if (!forcing.empty()) apply_config_key(cfg, "forcing", forcing);
    if (!out_dir.empty()) apply_config_key(cfg, "out", out_dir);
    if (!inner.empty()) apply_config_key(cfg, "inner", inner);
    if (spectral) cfg.spectral = true;
    if (strict) cfg.strict_safeguard = true;
    cfg.validate();
    if (profile && cfg.methods.size() < 2) throw ConfigError("--profile needs at least two methods");
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  fs::create_directories(cfg.out_dir);
  if (!export_dir.empty()) export_matrices(cfg, export_dir);

  if (cfg.spectral) {
    std::vector<EigTableCase> cases;
    for (const auto& c : expand_cases(cfg)) {
      if (c.method != cfg.methods.front()) continue;
      cases.push_back({c.problem, c.p, c.nu, c.eps, c.beta});
    }
    std::vector<SpectralReport> reports;
    for (const auto& c : cases) {
      reports.push_back(eig_table_case(c));
      const auto& r = reports.back();
      std::cerr << r.problem << " p=" << r.p << " nu=" << r.nu << " eps=" << r.eps << " beta1=" << r.beta1
                << " k=" << r.k << " |I|=" << r.inactive << " lam=[" << r.lam_min << ", " << r.lam_max << "] "
                << (r.pass() ? "pass" : "FAIL") << '\n';
    }
    const auto path = fs::path(cfg.out_dir) / "spectral.csv";
    std::ofstream f(path);
    write_spectral_csv(f, reports);
    std::cout << path.string() << '\n';
    return 0;
  }

  const auto rows = run_sweep(cfg, [](const SweepRow& r) {
    std::cerr << r.problem << " p=" << r.p << " nu=" << r.nu << " eps=" << r.eps << " beta1=" << r.beta1 << ' '
              << r.method << ": ";
    if (r.li)
      std::cerr << *r.li << '(' << *r.nli << ')';
    else
      std::cerr << '-';
    std::cerr << ' ' << r.outcome << '\n';
    if (r.outcome == "linear_failure") std::cerr << "warning: inner solver hit its iteration limit\n";
  });
  const auto path = fs::path(cfg.out_dir) / "sweep.csv";
  emit_tables(path.string(), rows);
  std::cout << path.string() << '\n';
  if (profile) {
    const auto prof = performance_profile(rows);
    for (const auto& e : prof.excluded) std::cerr << "warning: excluded from profile: " << e << '\n';
    const auto ppath = fs::path(cfg.out_dir) / "profile.csv";
    std::ofstream f(ppath);
    write_profile_csv(f, prof);
    std::cout << ppath.string() << '\n';
  }
  return 0;
}
