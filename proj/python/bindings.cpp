#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ocprec/experiments.hpp"
#include "ocprec/factorization.hpp"
#include "ocprec/krylov.hpp"
#include "ocprec/spectral.hpp"

namespace py = pybind11;
using namespace ocprec;

namespace {

Velocity to_velocity(const py::object& beta) {
  if (py::isinstance<py::str>(beta)) return parse_velocity(beta.cast<std::string>());
  if (py::isinstance<py::float_>(beta) || py::isinstance<py::int_>(beta)) return Point{beta.cast<double>(), 0, 0};
  const auto v = beta.cast<std::vector<double>>();
  if (v.size() != 3) throw std::invalid_argument("beta must be a number, 'rotational' or a length-3 sequence");
  return Point{v[0], v[1], v[2]};
}

py::tuple csr(const SparseMatrix& a) {
  return py::make_tuple(a.values(), a.col_indices(), a.row_offsets(), py::make_tuple(a.rows(), a.cols()));
}

py::dict record_dict(const NewtonRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["n_upper"] = r.n_upper;
  d["n_lower"] = r.n_lower;
  d["n_inactive"] = r.n_inactive;
  d["eta"] = r.eta;
  d["linear_target"] = r.linear_target;
  d["linear_iterations"] = r.linear_iterations;
  d["linear_residual"] = r.linear_residual;
  d["linear_converged"] = r.linear_converged;
  d["f_norm"] = r.f_norm;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Active-set Newton solver with Schur-approximation preconditioners";

  py::register_exception<KrylovBreakdown>(m, "KrylovBreakdown", PyExc_RuntimeError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_RuntimeError);
  py::register_exception<SpectralError>(m, "SpectralError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<DiscreteProblem>(m, "Problem")
      .def_property_readonly("name", [](const DiscreteProblem& p) { return p.spec.name; })
      .def_property_readonly("n", &DiscreteProblem::n)
      .def_property_readonly("level", [](const DiscreteProblem& p) { return p.grid.level; })
      .def_property_readonly("n1d", [](const DiscreteProblem& p) { return p.grid.n1d; })
      .def_property_readonly("spacing", [](const DiscreteProblem& p) { return p.grid.spacing; })
      .def_property_readonly("nu", &DiscreteProblem::nu)
      .def_property_readonly("alpha_u", &DiscreteProblem::alpha_u)
      .def_property_readonly("alpha_y", &DiscreteProblem::alpha_y)
      .def_property_readonly("m", [](const DiscreteProblem& p) { return p.m; })
      .def_property_readonly("y_d", [](const DiscreteProblem& p) { return p.y_d; })
      .def_property_readonly("a", [](const DiscreteProblem& p) { return p.a; })
      .def_property_readonly("b", [](const DiscreteProblem& p) { return p.b; })
      .def_property_readonly("has_lower",
                             [](const DiscreteProblem& p) { return std::vector<bool>(p.has_lower.begin(), p.has_lower.end()); })
      .def_property_readonly("has_upper",
                             [](const DiscreteProblem& p) { return std::vector<bool>(p.has_upper.begin(), p.has_upper.end()); })
      .def("nodes",
           [](const DiscreteProblem& p) {
             DenseMatrix x(p.n(), 3);
             for (Index i = 0; i < p.n(); ++i) {
               const Point q = p.grid.node(i);
               x.row(i) << q[0], q[1], q[2];
             }
             return x;
           })
      .def("operator_csr", [](const DiscreteProblem& p) { return csr(p.L); },
           "(data, indices, indptr, shape) of the convection-diffusion matrix L")
      .def("__repr__", [](const DiscreteProblem& p) {
        std::ostringstream s;
        s << "<Problem " << p.spec.name << " p=" << p.grid.level << " n=" << p.n() << " nu=" << p.nu() << '>';
        return s.str();
      });

  m.def("preset_problem",
        [](const std::string& name, int p, double nu, const py::object& beta, double eps) {
          return preset_problem(name, p, nu, to_velocity(beta), eps);
        },
        py::arg("name"), py::arg("p"), py::arg("nu"), py::arg("beta") = 0.0, py::arg("eps") = 0.0);

  py::class_<ActiveSet>(m, "ActiveSet")
      .def_static("from_indices", &ActiveSet::from_indices, py::arg("n"), py::arg("upper"), py::arg("lower"))
      .def_static("empty", &ActiveSet::empty)
      .def_static("full", &ActiveSet::full)
      .def_readonly("n", &ActiveSet::n)
      .def_readonly("upper", &ActiveSet::upper)
      .def_readonly("lower", &ActiveSet::lower)
      .def_readonly("inactive", &ActiveSet::inactive)
      .def_readonly("active", &ActiveSet::active)
      .def("__eq__", &ActiveSet::operator==)
      .def("__len__", &ActiveSet::n_active);

  py::class_<KktPoint>(m, "KktPoint")
      .def(py::init([](Vector y, Vector u, Vector p, Vector mu) { return KktPoint{y, u, p, mu}; }), py::arg("y"),
           py::arg("u"), py::arg("p"), py::arg("mu"))
      .def_static("zeros", &KktPoint::zeros)
      .def_readwrite("y", &KktPoint::y)
      .def_readwrite("u", &KktPoint::u)
      .def_readwrite("p", &KktPoint::p)
      .def_readwrite("mu", &KktPoint::mu);

  m.def("active_sets", py::overload_cast<const KktPoint&, const DiscreteProblem&>(&active_sets), py::arg("x"),
        py::arg("problem"));
  m.def("kkt_residual", py::overload_cast<const KktPoint&, const DiscreteProblem&>(&kkt_residual), py::arg("x"),
        py::arg("problem"));
  m.def("gammas", &gammas, py::arg("nu"), py::arg("alpha_u"), py::arg("alpha_y"));

  m.def("newton_matrix_csr",
        [](const DiscreteProblem& p, const ActiveSet& a) {
          const NewtonSystem sys(p, a);
          return py::make_tuple(csr(sys.assemble()), sys.rhs());
        },
        py::arg("problem"), py::arg("active"), "Reduced Newton matrix (CSR tuple) and right-hand side");

  m.def("apply_preconditioner",
        [](const DiscreteProblem& p, const ActiveSet& a, const Vector& r, const std::string& kind) {
          const SchurFactor f = build_schur_factor(p, a);
          if (kind == "ipf") return apply_ipf_inverse(f, r);
          if (kind == "bdf") return apply_bdf_inverse(f, r);
          if (kind == "shat") return apply_shat_inverse(f, r);
          throw std::invalid_argument("kind must be ipf, bdf or shat");
        },
        py::arg("problem"), py::arg("active"), py::arg("r"), py::arg("kind") = "ipf");

  py::class_<NewtonResult>(m, "NewtonResult")
      .def_property_readonly("point", [](const NewtonResult& r) { return r.point; })
      .def_property_readonly("outcome", [](const NewtonResult& r) { return to_string(r.trace.outcome); })
      .def_property_readonly("converged", [](const NewtonResult& r) { return r.trace.outcome == Outcome::Converged; })
      .def_property_readonly("nli", [](const NewtonResult& r) { return r.trace.nli(); })
      .def_property_readonly("li", [](const NewtonResult& r) { return r.trace.mean_linear_iterations(); })
      .def_property_readonly("initial_f_norm", [](const NewtonResult& r) { return r.trace.initial_f_norm; })
      .def_property_readonly("total_seconds", [](const NewtonResult& r) { return r.trace.total_seconds; })
      .def_property_readonly("records", [](const NewtonResult& r) {
        py::list out;
        for (const auto& rec : r.trace.records) out.append(record_dict(rec));
        return out;
      });

  m.def("newton_solve",
        [](const DiscreteProblem& p, const std::string& method, const std::string& forcing, int max_newton,
           int max_linear, double tau_f, const std::string& inner, bool strict) {
          NewtonOptions o;
          o.method = parse_method(method);
          o.forcing = parse_forcing(forcing);
          o.max_newton = max_newton;
          o.max_linear = max_linear;
          o.tau_f = tau_f;
          if (inner == "mg" || inner == "multigrid")
            o.inner.kind = InnerSolverPolicy::Kind::Multigrid;
          else if (inner != "direct")
            throw std::invalid_argument("inner must be direct or mg");
          if (strict) o.strict_safeguard();
          py::gil_scoped_release release;
          return newton_solve(p, o);
        },
        py::arg("problem"), py::arg("method") = "gmres-ipf", py::arg("forcing") = "exact", py::arg("max_newton") = 200,
        py::arg("max_linear") = 0, py::arg("tau_f") = 1e-8, py::arg("inner") = "direct",
        py::arg("strict_safeguard") = false);

  m.def("forcing_exact", &forcing_exact, py::arg("k"), py::arg("tau1") = 1e-10);
  m.def("forcing_inexact", &forcing_inexact, py::arg("k"), py::arg("eta_prev"), py::arg("f_norm"),
        py::arg("tau2") = 1e-4, py::arg("tau3") = 1e-2);

  // Dense spectral diagnostics
  m.def("pencil_eigs", &pencil_eigs, py::arg("S"), py::arg("Shat"));
  m.def("alpha_min", &alpha_min, py::arg("G"), py::arg("H"));
  m.def("lemma_f_property",
        [](const DenseMatrix& F) {
          const auto r = lemma_f_property(F);
          return py::make_tuple(r.norm1, r.norm2, r.pass);
        },
        py::arg("F"));
  m.def("bdf_intervals",
        [](double a) {
          const auto iv = bdf_intervals(a);
          py::dict d;
          d["bounded"] = iv.bounded;
          d["minus"] = py::make_tuple(iv.minus_lo, iv.minus_hi);
          d["plus"] = py::make_tuple(iv.plus_lo, iv.plus_hi);
          d["points"] = iv.points;
          return d;
        },
        py::arg("alpha_min"));
  m.def("pencil_summary",
        [](const DiscreteProblem& p, const ActiveSet& a) {
          const auto s = pencil_summary(p, a);
          py::dict d;
          d["lam_min"] = s.lam_min;
          d["lam_max"] = s.lam_max;
          d["alpha_min"] = s.alpha_min;
          d["identity_error"] = s.identity_error;
          return d;
        },
        py::arg("problem"), py::arg("active"));
  m.def("zeta_bounds",
        [](const DiscreteProblem& p, const ActiveSet& a) {
          const auto z = zeta_bounds(p, a);
          return py::make_tuple(z.zeta, z.bound, z.lambda_max, z.pass);
        },
        py::arg("problem"), py::arg("active"));
  m.def("ipf_spectrum",
        [](const DiscreteProblem& p, const ActiveSet& a) {
          const auto c = ipf_spectrum_check(p, a);
          py::dict d;
          d["eigenvalues"] = c.eig_real;
          d["max_imag"] = c.max_imag;
          d["alpha_min"] = c.alpha_min;
          d["membership_violation"] = c.membership_violation;
          d["reconstruction_error"] = c.reconstruction_error;
          d["pass"] = c.pass;
          return d;
        },
        py::arg("problem"), py::arg("active"));
  m.def("bdf_spectrum",
        [](const DiscreteProblem& p, const ActiveSet& a) {
          const auto c = bdf_spectrum_check(p, a);
          py::dict d;
          d["eigenvalues"] = c.eigenvalues;
          d["alpha_min"] = c.alpha_min;
          d["membership_violation"] = c.membership_violation;
          d["pass"] = c.pass;
          return d;
        },
        py::arg("problem"), py::arg("active"));

  m.def("eig_table_case",
        [](const std::string& problem, int p, double nu, double eps, const py::object& beta) {
          SpectralReport r;
          {
            const EigTableCase c{problem, p, nu, eps, to_velocity(beta)};
            py::gil_scoped_release release;
            r = eig_table_case(c);
          }
          py::dict d;
          d["k"] = r.k;
          d["inactive"] = r.inactive;
          d["lam_min"] = r.lam_min;
          d["lam_max"] = r.lam_max;
          d["alpha_min"] = r.alpha_min;
          d["bound_hi"] = r.bound_hi;
          d["zeta"] = r.zeta ? py::cast(*r.zeta) : py::none();
          d["pass"] = r.pass();
          return d;
        },
        py::arg("problem"), py::arg("p"), py::arg("nu"), py::arg("eps") = 0.0, py::arg("beta") = 0.0);

  // Sweeps
  m.def("run_sweep",
        [](const std::string& config_text) {
          const ExperimentConfig cfg = parse_config_text(config_text);
          std::vector<SweepRow> rows;
          {
            py::gil_scoped_release release;
            rows = run_sweep(cfg);
          }
          std::ostringstream s;
          emit_tables(s, rows);
          return s.str();
        },
        py::arg("config_text"), "Run a sweep from 'key = value' config text and return the CSV");
  m.def("performance_profile",
        [](const std::string& csv, const std::string& metric) {
          std::istringstream in(csv);
          const auto prof = performance_profile(parse_sweep_csv(in), metric);
          py::dict d;
          for (const auto& c : prof.curves) d[py::str(c.method)] = py::make_tuple(c.taus, c.pis);
          return py::make_tuple(d, prof.n_problems, prof.excluded);
        },
        py::arg("csv"), py::arg("metric") = "tcpu");
}
