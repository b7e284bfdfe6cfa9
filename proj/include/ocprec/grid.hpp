#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ocprec/sparse.hpp"

namespace ocprec {

using Point = std::array<double, 3>;

struct Box {
  Point lo{0.0, 0.0, 0.0};
  Point hi{1.0, 1.0, 1.0};
};

// Velocity is either a constant vector or the rotational field
//   (-2x(1-x)(2y-1)z, (2x-1)y(1-y), (2x-1)(2y-1)z(1-z)).
struct RotationalVelocity {};
using Velocity = std::variant<Point, RotationalVelocity>;

Point evaluate_velocity(const Velocity& beta, const Point& x);
std::string velocity_label(const Velocity& beta);

using ScalarField = std::function<double(const Point&)>;

struct ProblemSpec {
  std::string name;
  Box domain;
  double nu = 1e-2;
  double alpha_u = 1.0;
  double alpha_y = 0.0;
  double epsilon = 0.0;
  Velocity beta = Point{0.0, 0.0, 0.0};
  // nullopt means the bound is absent (a = -inf or b = +inf).
  std::optional<ScalarField> bound_lo;
  std::optional<ScalarField> bound_hi;
  ScalarField target;
  double c = 1.0;

  void validate() const;
};

struct Grid {
  int level = 1;
  Index n1d = 0;
  Box domain;
  Point spacing{};
  Index n_h = 0;

  double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  Index index(Index i, Index j, Index k) const { return i + n1d * (j + n1d * k); }
  std::array<Index, 3> coords(Index idx) const;
  Point node(Index idx) const;
};

Grid build_grid(int p, const Box& domain);

SparseMatrix assemble_operator(const Grid& grid, const Velocity& beta);

// Diagonal of the lumped mass matrix.
Vector assemble_mass(const Grid& grid);

struct SampledFields {
  Vector y_d;
  Vector a;
  Vector b;
  std::vector<char> has_lower;
  std::vector<char> has_upper;
};

SampledFields sample_fields(const Grid& grid, const ProblemSpec& spec);

struct DiscreteProblem {
  Grid grid;
  SparseMatrix L;
  Vector m;  // diagonal of M
  Vector y_d;
  Vector a;  // meaningful only where has_lower
  Vector b;  // meaningful only where has_upper
  Vector d;
  std::vector<char> has_lower;
  std::vector<char> has_upper;
  ProblemSpec spec;

  Index n() const { return grid.n_h; }
  double nu() const { return spec.nu; }
  double alpha_u() const { return spec.alpha_u; }
  double alpha_y() const { return spec.alpha_y; }
};

DiscreteProblem discretize(const ProblemSpec& spec, int p);

ProblemSpec preset_spec(const std::string& name, double nu, const Velocity& beta, double epsilon);

DiscreteProblem preset_problem(const std::string& name, int p, double nu, const Velocity& beta = Point{0, 0, 0},
                               double epsilon = 0.0);

bool is_preset(const std::string& name);

}  // namespace ocprec
