#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ocprec/grid.hpp"
#include "ocprec/newton.hpp"
#include "ocprec/spectral.hpp"

namespace ocprec {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::vector<std::string> problems{"CC-Pb1"};
  std::vector<int> levels{2};
  std::vector<double> nus{1e-2};
  std::vector<Velocity> betas{Point{0, 0, 0}};
  std::vector<double> eps{1e-2};  // used by MC-Pb1 only
  std::vector<Method> methods{Method::GmresIpf};
  Forcing forcing = Forcing::Exact;
  std::string out_dir = ".";
  std::uint64_t seed = 0;  // reserved; the solvers are deterministic
  bool spectral = false;
  bool strict_safeguard = false;
  InnerSolverPolicy inner;

  void validate() const;
};

// key = value lines, '#' comments, lists comma-separated.
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base = {});

Velocity parse_velocity(const std::string& s);

struct SweepCase {
  std::string problem;
  int p = 2;
  double nu = 1e-2;
  double eps = 0.0;
  Velocity beta = Point{0, 0, 0};
  Method method = Method::GmresIpf;
};

// Canonically ordered cases; non-MC problems get a single eps = 0 entry.
std::vector<SweepCase> expand_cases(const ExperimentConfig& cfg);

struct SweepRow {
  std::string problem;
  int p = 0;
  double nu = 0.0;
  double eps = 0.0;
  std::string beta1;
  std::string method;
  std::optional<double> li;
  std::optional<int> nli;
  double cpu = 0.0;   // mean seconds per Newton step
  double tcpu = 0.0;  // total seconds
  std::string outcome;

  bool failed() const { return outcome != "converged"; }
};

SweepRow run_case(const SweepCase& c, const ExperimentConfig& cfg);
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const std::function<void(const SweepRow&)>& on_row = {});
void sort_rows(std::vector<SweepRow>& rows);

struct ProfileCurve {
  std::string method;
  std::vector<double> taus;  // breakpoints, ascending, >= 1
  std::vector<double> pis;   // value from each breakpoint on
  double operator()(double tau) const;
};

struct ProfileResult {
  std::vector<ProfileCurve> curves;
  std::vector<std::string> excluded;  // problems every method failed on
  int n_problems = 0;
};

ProfileResult performance_profile(const std::vector<SweepRow>& rows, const std::string& metric = "tcpu");

struct EmitOptions {
  bool timing = true;
};

std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);
std::string format_number(double v);

void emit_tables(std::ostream& out, const std::vector<SweepRow>& rows, const EmitOptions& opts = {});
void emit_tables(const std::string& path, const std::vector<SweepRow>& rows, const EmitOptions& opts = {});
std::vector<SweepRow> parse_sweep_csv(std::istream& in);

void write_profile_csv(std::ostream& out, const ProfileResult& profile);

std::string level_note();

}  // namespace ocprec
