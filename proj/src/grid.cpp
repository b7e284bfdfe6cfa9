#include "ocprec/grid.hpp"

#include <cmath>
#include <sstream>

namespace ocprec {

Point evaluate_velocity(const Velocity& beta, const Point& x) {
  if (const auto* c = std::get_if<Point>(&beta)) return *c;
  const double X = x[0], Y = x[1], Z = x[2];
  return {-2.0 * X * (1.0 - X) * (2.0 * Y - 1.0) * Z, (2.0 * X - 1.0) * Y * (1.0 - Y),
          (2.0 * X - 1.0) * (2.0 * Y - 1.0) * Z * (1.0 - Z)};
}

std::string velocity_label(const Velocity& beta) {
  if (std::holds_alternative<RotationalVelocity>(beta)) return "rotational";
  const auto& c = std::get<Point>(beta);
  std::ostringstream s;
  s << c[0];
  if (c[1] != 0.0 || c[2] != 0.0) s << ';' << c[1] << ';' << c[2];
  return s.str();
}

void ProblemSpec::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (alpha_u < 0.0 || alpha_y < 0.0) throw std::invalid_argument("alpha_u and alpha_y must be nonnegative");
  if (std::max(alpha_u, alpha_y) <= 0.0) throw std::invalid_argument("max(alpha_u, alpha_y) must be positive");
  if (!target) throw std::invalid_argument("target function missing");
  for (int a = 0; a < 3; ++a)
    if (!(domain.hi[a] > domain.lo[a])) throw std::invalid_argument("nonpositive domain extent");
}

std::array<Index, 3> Grid::coords(Index idx) const {
  return {idx % n1d, (idx / n1d) % n1d, idx / (n1d * n1d)};
}

Point Grid::node(Index idx) const {
  auto c = coords(idx);
  Point x;
  for (int a = 0; a < 3; ++a) x[a] = domain.lo[a] + static_cast<double>(c[a] + 1) * spacing[a];
  return x;
}

Grid build_grid(int p, const Box& domain) {
  if (p < 1) throw std::invalid_argument("grid level must be >= 1");
  if (p > 20) throw std::invalid_argument("grid level too large");
  Grid g;
  g.level = p;
  g.domain = domain;
  const Index cells = Index{1} << (p + 1);
  g.n1d = cells - 1;
  for (int a = 0; a < 3; ++a) {
    double ext = domain.hi[a] - domain.lo[a];
    if (!(ext > 0.0)) throw std::invalid_argument("nonpositive domain extent");
    g.spacing[a] = ext / static_cast<double>(cells);
  }
  g.n_h = g.n1d * g.n1d * g.n1d;
  return g;
}

SparseMatrix assemble_operator(const Grid& grid, const Velocity& beta) {
  const Index n = grid.n_h;
  const double vol = grid.cell_volume();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(7 * n));
  for (Index idx = 0; idx < n; ++idx) {
    const auto c = grid.coords(idx);
    const Point x = grid.node(idx);
    const Point b = evaluate_velocity(beta, x);
    double diag = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double h = grid.spacing[a];
      const double lap = 1.0 / (h * h);
      double lo_coef = -lap;  // coefficient of the neighbour at c[a]-1
      double hi_coef = -lap;  // ... at c[a]+1
      diag += 2.0 * lap;
      if (b[a] > 0.0) {
        diag += b[a] / h;
        lo_coef -= b[a] / h;
      } else if (b[a] < 0.0) {
        diag -= b[a] / h;
        hi_coef += b[a] / h;
      }
      auto nb = c;
      if (c[a] > 0) {
        nb[a] = c[a] - 1;
        t.push_back({idx, grid.index(nb[0], nb[1], nb[2]), vol * lo_coef});
      }
      if (c[a] + 1 < grid.n1d) {
        nb[a] = c[a] + 1;
        t.push_back({idx, grid.index(nb[0], nb[1], nb[2]), vol * hi_coef});
      }
    }
    t.push_back({idx, idx, vol * diag});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

Vector assemble_mass(const Grid& grid) { return Vector::Constant(grid.n_h, grid.cell_volume()); }

SampledFields sample_fields(const Grid& grid, const ProblemSpec& spec) {
  const Index n = grid.n_h;
  SampledFields f;
  f.y_d.resize(n);
  f.a = Vector::Zero(n);
  f.b = Vector::Zero(n);
  f.has_lower.assign(n, spec.bound_lo.has_value());
  f.has_upper.assign(n, spec.bound_hi.has_value());
  for (Index i = 0; i < n; ++i) {
    const Point x = grid.node(i);
    f.y_d[i] = spec.target(x);
    if (spec.bound_lo) f.a[i] = (*spec.bound_lo)(x);
    if (spec.bound_hi) f.b[i] = (*spec.bound_hi)(x);
    if (spec.bound_lo && spec.bound_hi && !(f.a[i] < f.b[i]))
      throw std::invalid_argument("lower bound must be below upper bound");
  }
  return f;
}

DiscreteProblem discretize(const ProblemSpec& spec, int p) {
  spec.validate();
  DiscreteProblem prob;
  prob.grid = build_grid(p, spec.domain);
  prob.L = assemble_operator(prob.grid, spec.beta);
  prob.m = assemble_mass(prob.grid);
  auto f = sample_fields(prob.grid, spec);
  prob.y_d = std::move(f.y_d);
  prob.a = std::move(f.a);
  prob.b = std::move(f.b);
  prob.has_lower = std::move(f.has_lower);
  prob.has_upper = std::move(f.has_upper);
  prob.d = Vector::Zero(prob.grid.n_h);
  prob.spec = spec;
  return prob;
}

namespace {

double pb1_target(const Point& x) { return std::abs(x[0]) <= 0.5 ? 1.0 : -2.0; }

}  // namespace

bool is_preset(const std::string& name) {
  return name == "CC-Pb1" || name == "CC-Pb2" || name == "MC-Pb1" || name == "SC-Pb1";
}

ProblemSpec preset_spec(const std::string& name, double nu, const Velocity& beta, double epsilon) {
  ProblemSpec s;
  s.name = name;
  s.nu = nu;
  s.beta = beta;
  s.epsilon = epsilon;
  if (name == "CC-Pb1") {
    s.domain = {{-1, -1, -1}, {1, 1, 1}};
    s.alpha_u = 1.0;
    s.alpha_y = 0.0;
    s.bound_lo = [](const Point&) { return 0.0; };
    s.bound_hi = [](const Point&) { return 2.5; };
    s.target = pb1_target;
  } else if (name == "CC-Pb2") {
    s.domain = {{0, 0, 0}, {1, 1, 1}};
    s.alpha_u = 1.0;
    s.alpha_y = 0.0;
    s.bound_lo = [](const Point& x) { return 0.1 * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); };
    s.bound_hi = [](const Point&) { return 0.5; };
    s.target = [](const Point& x) {
      double r2 = 0.0;
      for (double xi : x) r2 += (xi - 0.5) * (xi - 0.5);
      return std::exp(-64.0 * r2);
    };
  } else if (name == "MC-Pb1" || name == "SC-Pb1") {
    s.domain = {{-1, -1, -1}, {1, 1, 1}};
    if (name == "MC-Pb1" && epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
    s.alpha_u = name == "MC-Pb1" ? epsilon : 0.0;
    s.alpha_y = 1.0;
    s.bound_hi = [](const Point&) { return 0.0; };
    s.target = pb1_target;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return s;
}

DiscreteProblem preset_problem(const std::string& name, int p, double nu, const Velocity& beta, double epsilon) {
  return discretize(preset_spec(name, nu, beta, epsilon), p);
}

}  // namespace ocprec
