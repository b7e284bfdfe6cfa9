#include "ocprec/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace ocprec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t == "-inf" || t == "-Inf") return 0.0;  // eps = 10^-inf
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: " + s);
  }
  if (pos != t.size()) throw ConfigError("not a number: " + s);
  return v;
}

int parse_int(const std::string& s) {
  const std::string t = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("not an integer: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("not a boolean: " + s);
}

}  // namespace

Velocity parse_velocity(const std::string& s) {
  const std::string t = trim(s);
  if (t == "rotational" || t == "rot") return RotationalVelocity{};
  std::vector<std::string> parts;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ';')) parts.push_back(item);
  if (parts.size() == 1) return Point{parse_double(parts[0]), 0.0, 0.0};
  if (parts.size() == 3) return Point{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
  throw ConfigError("velocity must be 'rotational', b1, or b1;b2;b3: " + s);
}

void ExperimentConfig::validate() const {
  if (problems.empty() || levels.empty() || nus.empty() || betas.empty() || eps.empty() || methods.empty())
    throw ConfigError("every parameter list must be nonempty");
  for (const auto& p : problems)
    if (!is_preset(p)) throw ConfigError("unknown problem: " + p);
  for (int p : levels)
    if (p < 1 || p > 8) throw ConfigError("levels must lie in [1, 8]");
  for (double v : nus)
    if (!(v > 0.0)) throw ConfigError("nu must be positive");
  for (double e : eps)
    if (!(e >= 0.0)) throw ConfigError("eps must be nonnegative");
  for (const auto& pr : problems)
    for (Method m : methods)
      if (m == Method::BpcgBt && pr.rfind("CC-", 0) != 0)
        throw ConfigError("bpcg-bt supports the control-constrained problems only");
}

void apply_config_key(ExperimentConfig& cfg, const std::string& key_in, const std::string& value) {
  const std::string key = trim(key_in);
  try {
    if (key == "problem" || key == "problems") {
      cfg.problems = split_list(value);
    } else if (key == "levels" || key == "level" || key == "p") {
      cfg.levels.clear();
      for (const auto& s : split_list(value)) cfg.levels.push_back(parse_int(s));
    } else if (key == "nu") {
      cfg.nus.clear();
      for (const auto& s : split_list(value)) cfg.nus.push_back(parse_double(s));
    } else if (key == "beta1" || key == "beta") {
      cfg.betas.clear();
      for (const auto& s : split_list(value)) cfg.betas.push_back(parse_velocity(s));
    } else if (key == "eps" || key == "epsilon") {
      cfg.eps.clear();
      for (const auto& s : split_list(value)) cfg.eps.push_back(parse_double(s));
    } else if (key == "method" || key == "methods") {
      cfg.methods.clear();
      for (const auto& s : split_list(value)) cfg.methods.push_back(parse_method(s));
    } else if (key == "forcing") {
      cfg.forcing = parse_forcing(trim(value));
    } else if (key == "out") {
      cfg.out_dir = trim(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value));
    } else if (key == "spectral") {
      cfg.spectral = parse_bool(value);
    } else if (key == "strict_safeguard" || key == "strict-safeguard") {
      cfg.strict_safeguard = parse_bool(value);
    } else if (key == "inner") {
      const std::string v = trim(value);
      if (v == "direct") cfg.inner.kind = InnerSolverPolicy::Kind::Direct;
      else if (v == "mg" || v == "multigrid") cfg.inner.kind = InnerSolverPolicy::Kind::Multigrid;
      else throw ConfigError("inner must be direct or mg");
    } else if (key == "smoothing") {
      cfg.inner.pre_smooth = cfg.inner.post_smooth = parse_int(value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_config_key(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::vector<SweepCase> expand_cases(const ExperimentConfig& cfg) {
  std::vector<SweepCase> out;
  for (const auto& prob : cfg.problems) {
    const std::vector<double> eps_list = prob == "MC-Pb1" ? cfg.eps : std::vector<double>{0.0};
    for (int p : cfg.levels)
      for (double nu : cfg.nus)
        for (double e : eps_list)
          for (const auto& b : cfg.betas)
            for (Method m : cfg.methods) out.push_back({prob, p, nu, e, b, m});
  }
  return out;
}

SweepRow run_case(const SweepCase& c, const ExperimentConfig& cfg) {
  SweepRow row;
  row.problem = c.problem;
  row.p = c.p;
  row.nu = c.nu;
  row.eps = c.eps;
  row.beta1 = velocity_label(c.beta);
  row.method = to_string(c.method);
  try {
    const DiscreteProblem pr = preset_problem(c.problem, c.p, c.nu, c.beta, c.eps);
    NewtonOptions opts;
    opts.method = c.method;
    opts.forcing = cfg.forcing;
    opts.inner = cfg.inner;
    if (cfg.strict_safeguard) opts.strict_safeguard();
    const NewtonResult res = newton_solve(pr, opts);
    row.outcome = to_string(res.trace.outcome);
    row.cpu = res.trace.mean_linear_seconds();
    row.tcpu = res.trace.total_seconds;
    if (res.trace.outcome == Outcome::Converged) {
      row.li = res.trace.mean_linear_iterations();
      row.nli = res.trace.nli();
    }
  } catch (const std::exception& e) {
    row.outcome = "error";
  }
  return row;
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.problem, a.p, a.nu, a.eps, a.beta1, a.method) <
           std::tie(b.problem, b.p, b.nu, b.eps, b.beta1, b.method);
  });
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::function<void(const SweepRow&)>& on_row) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (const auto& c : expand_cases(cfg)) {
    rows.push_back(run_case(c, cfg));
    if (on_row) on_row(rows.back());
  }
  sort_rows(rows);
  return rows;
}

double ProfileCurve::operator()(double tau) const {
  double v = 0.0;
  for (std::size_t i = 0; i < taus.size() && taus[i] <= tau; ++i) v = pis[i];
  return v;
}

ProfileResult performance_profile(const std::vector<SweepRow>& rows, const std::string& metric) {
  if (metric != "tcpu" && metric != "cpu") throw std::invalid_argument("metric must be tcpu or cpu");
  using Key = std::tuple<std::string, int, double, double, std::string>;
  std::map<Key, std::map<std::string, double>> times;
  std::set<std::string> methods;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    methods.insert(r.method);
    const double t = r.failed() ? inf : (metric == "tcpu" ? r.tcpu : r.cpu);
    times[Key{r.problem, r.p, r.nu, r.eps, r.beta1}][r.method] = t;
  }
  if (methods.size() < 2) throw std::invalid_argument("performance profiles need at least two methods");

  ProfileResult res;
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& [key, per] : times) {
    double best = inf;
    for (const auto& [m, t] : per) best = std::min(best, t);
    if (!std::isfinite(best)) {
      std::ostringstream s;
      s << std::get<0>(key) << " p=" << std::get<1>(key) << " nu=" << std::get<2>(key) << " eps=" << std::get<3>(key)
        << " beta1=" << std::get<4>(key);
      res.excluded.push_back(s.str());
      continue;
    }
    ++res.n_problems;
    for (const auto& m : methods) {
      auto it = per.find(m);
      const double t = it == per.end() ? inf : it->second;
      // A zero best time only arises from clock resolution; treat ties as ratio 1.
      ratios[m].push_back(best > 0.0 ? t / best : (t > 0.0 ? inf : 1.0));
    }
  }
  for (const auto& m : methods) {
    ProfileCurve c;
    c.method = m;
    auto r = ratios[m];
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i])) break;
      if (i + 1 < r.size() && r[i + 1] == r[i]) continue;
      c.taus.push_back(std::max(1.0, r[i]));
      c.pis.push_back(static_cast<double>(i + 1) / res.n_problems);
    }
    res.curves.push_back(std::move(c));
  }
  return res;
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char ch : f) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV field");
  out.push_back(cur);
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string level_note() {
  return "# level p: 2^(p+1)-1 interior points per axis, mesh width = (domain length)/2^(p+1); "
         "p=2 is n_h=343 (labelled h=2^-2), p=3 is n_h=3375 (h=2^-3)";
}

namespace {

const char* kSweepHeader = "problem,p,nu,eps,beta1,method,li,nli,cpu,tcpu,outcome";

std::string format_li(double li) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", li);
  return buf;
}

}  // namespace

void emit_tables(std::ostream& out, const std::vector<SweepRow>& rows, const EmitOptions& opts) {
  out << level_note() << '\n';
  out << "# failed runs report '-' for li and nli\n";
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << csv_escape(r.problem) << ',' << r.p << ',' << format_number(r.nu) << ',' << format_number(r.eps) << ','
        << csv_escape(r.beta1) << ',' << csv_escape(r.method) << ',' << (r.li ? format_li(*r.li) : "-") << ','
        << (r.nli ? std::to_string(*r.nli) : "-") << ',';
    if (opts.timing)
      out << format_number(r.cpu) << ',' << format_number(r.tcpu);
    else
      out << ',';
    out << ',' << csv_escape(r.outcome) << '\n';
  }
}

void emit_tables(const std::string& path, const std::vector<SweepRow>& rows, const EmitOptions& opts) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  emit_tables(f, rows, opts);
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSweepHeader) throw std::runtime_error("unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    const auto f = csv_split(line);
    if (f.size() != 11) throw std::runtime_error("expected 11 CSV fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.problem = f[0];
    r.p = parse_int(f[1]);
    r.nu = parse_double(f[2]);
    r.eps = parse_double(f[3]);
    r.beta1 = f[4];
    r.method = f[5];
    if (f[6] != "-") r.li = parse_double(f[6]);
    if (f[7] != "-") r.nli = parse_int(f[7]);
    r.cpu = f[8].empty() ? 0.0 : parse_double(f[8]);
    r.tcpu = f[9].empty() ? 0.0 : parse_double(f[9]);
    r.outcome = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_profile_csv(std::ostream& out, const ProfileResult& prof) {
  out << "# performance profile over " << prof.n_problems << " problems; failures count as infinite ratio\n";
  for (const auto& e : prof.excluded) out << "# excluded (all methods failed): " << e << '\n';
  out << "method,tau,pi\n";
  for (const auto& c : prof.curves)
    for (std::size_t i = 0; i < c.taus.size(); ++i)
      out << csv_escape(c.method) << ',' << format_number(c.taus[i]) << ',' << format_number(c.pis[i]) << '\n';
}

void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& reports) {
  out << level_note() << '\n';
  out << "# k = Newton iteration whose active set gives the largest lam_max (k = 0 is the empty start set)\n";
  out << "problem,p,nu,eps,beta1,k,inactive,lam_min,lam_max,alpha_min,bound_hi,pass\n";
  auto fix = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    out << csv_escape(r.problem) << ',' << r.p << ',' << format_number(r.nu) << ',' << format_number(r.eps) << ','
        << csv_escape(r.beta1) << ',' << r.k << ',' << r.inactive << ',' << fix(r.lam_min) << ',' << fix(r.lam_max)
        << ',' << fix(r.alpha_min) << ',' << fix(r.bound_hi) << ',' << (r.pass() ? "pass" : "fail") << '\n';
  }
}

}  // namespace ocprec
