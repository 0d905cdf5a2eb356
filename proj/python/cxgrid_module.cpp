#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cxgrid/analysis.hpp"
#include "cxgrid/cli.hpp"
#include "cxgrid/composition.hpp"
#include "cxgrid/errors.hpp"
#include "cxgrid/grid.hpp"
#include "cxgrid/problems.hpp"
#include "cxgrid/rk.hpp"

namespace py = pybind11;
using namespace cxgrid;

namespace {

CVector nodes_of(const TimeGrid& grid) {
  const auto nodes = grid.nodes();
  return Eigen::Map<const CVector>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
}

TimeGrid grid_from(const CVector& nodes) {
  return TimeGrid(std::vector<Complex>(nodes.data(), nodes.data() + nodes.size()));
}

CMatrix values_of(const GridFunction& gf) {
  const auto d = gf.values.front().size();
  CMatrix out(static_cast<Eigen::Index>(gf.values.size()), d);
  for (std::size_t j = 0; j < gf.values.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = gf.values[j].transpose();
  return out;
}

PathSpec make_path(const std::string& kind, Complex t0, Complex t, int p, bool conjugated) {
  if (kind == "real") return PathSpec::segment(t0, t);
  if (kind == "circle") return PathSpec::circle(t0, t, p, conjugated);
  throw DomainError("path kind must be 'real' or 'circle'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Explicit Runge-Kutta methods along complex time grids";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<StepError>(m, "StepError", PyExc_RuntimeError);
  py::register_exception<IndeterminateOrderError>(m, "IndeterminateOrderError", PyExc_RuntimeError);

  m.def("mat_exp", &mat_exp, py::arg("M"));
  m.def("mat_poly_eval",
        [](const std::vector<Complex>& coeffs, const CMatrix& M) { return mat_poly_eval(coeffs, M); },
        py::arg("coeffs"), py::arg("M"));
  m.def("exact_linear_flow", &exact_linear_flow, py::arg("A"), py::arg("t0"), py::arg("t"), py::arg("x0"));

  m.def("gamma_segment", &gamma_segment, py::arg("t0"), py::arg("t"), py::arg("p"), py::arg("x"));
  m.def(
      "discretize",
      [](const std::string& kind, Complex t0, Complex t, int n, int p, bool conjugated) {
        return nodes_of(discretize(make_path(kind, t0, t, p, conjugated), n));
      },
      py::arg("kind"), py::arg("t0"), py::arg("t"), py::arg("n"), py::arg("p") = 1, py::arg("conjugated") = false,
      "Nodes of the n-step discretization of a 'real' or 'circle' path.");
  m.def(
      "roots_of_unity_steps",
      [](Complex t0, Complex t, int p, int n, int k) { return nodes_of(roots_of_unity_steps(t0, t, p, n, k)); },
      py::arg("t0"), py::arg("t"), py::arg("p"), py::arg("n"), py::arg("k") = 0);
  m.def(
      "fractal_grid",
      [](int p, int g, int k, int r, Complex t0, Complex h) { return nodes_of(fractal_grid(p, g, k, r, t0, h)); },
      py::arg("p"), py::arg("g"), py::arg("k"), py::arg("r"), py::arg("t0"), py::arg("h"));
  m.def(
      "symmetric_witness",
      [](const CVector& nodes, double tol) { return symmetric_witness(grid_from(nodes), tol); }, py::arg("nodes"),
      py::arg("tol") = 1e-12);

  m.def("builtin_methods", &builtin_tableau_names);
  m.def(
      "tableau", [](const std::string& name) { return tableau_to_json(builtin_tableau(name)).dump(); },
      py::arg("name"), "Tableau JSON of a built-in method.");
  m.def(
      "stability_polynomial", [](const std::string& name) { return stability_polynomial(builtin_tableau(name)); },
      py::arg("method"));
  m.def(
      "integrate_linear",
      [](const std::string& method, const CMatrix& A, const CVector& x0, const CVector& nodes) {
        const auto problem = make_linear(A, nodes[0], x0);
        return values_of(integrate(builtin_tableau(method), problem.rhs, grid_from(nodes), x0));
      },
      py::arg("method"), py::arg("A"), py::arg("x0"), py::arg("nodes"),
      "Values on every node for x' = A x; one row per node.");
  m.def(
      "integrate",
      [](const std::string& method, const std::function<CVector(Complex, const CVector&)>& f, const CVector& nodes,
         const CVector& x0) { return values_of(integrate(builtin_tableau(method), f, grid_from(nodes), x0)); },
      py::arg("method"), py::arg("f"), py::arg("nodes"), py::arg("x0"));

  m.def(
      "schedule_from_path",
      [](int p, int k) {
        const auto s = schedule_from_path(p, k);
        return std::vector<Complex>(s.sigma().begin(), s.sigma().end());
      },
      py::arg("p"), py::arg("k"));
  m.def(
      "order_condition_residuals",
      [](const std::vector<Complex>& sigma, int p) {
        const auto r = order_condition_residuals(sigma, p);
        return py::make_tuple(r.consistency, r.power_sum);
      },
      py::arg("sigma"), py::arg("p"));
  m.def(
      "iterated_grid",
      [](const std::string& method, int k, int r, Complex t0, Complex h) {
        const auto it = iterate_method(builtin_tableau(method), k, r);
        return py::make_tuple(nodes_of(it.grid(t0, h)), it.order());
      },
      py::arg("method"), py::arg("k"), py::arg("r"), py::arg("t0"), py::arg("h"),
      "Micro grid of one macro step and the achieved order.");

  m.def(
      "estimate_order",
      [](const std::string& method, const std::string& problem_name, const std::string& kind, int p,
         const std::vector<int>& n_values, bool conjugated) {
        const auto problem = builtin_problem(problem_name);
        const Complex t0 = problem.t0;
        const GridFamily family = [&](int n) { return discretize(make_path(kind, t0, t0 + 1.0, p, conjugated), n); };
        const auto study = estimate_order(builtin_tableau(method), problem, family, n_values);
        py::dict out;
        out["n"] = study.n_values;
        out["delta"] = study.deltas;
        out["error"] = study.errors;
        out["im_norm"] = study.im_norms;
        out["slope"] = study.fitted_slope;
        return out;
      },
      py::arg("method"), py::arg("problem"), py::arg("kind"), py::arg("p"), py::arg("n_values"),
      py::arg("conjugated") = false);
  m.def(
      "main_theorem_ratio",
      [](const std::string& method, const CMatrix& A, const CVector& x0, const std::string& kind, int p, int n) {
        const auto r = main_theorem_ratio(builtin_tableau(method), A, x0, make_path(kind, 0.0, 1.0, p, false), n);
        return py::make_tuple(r.lhs, r.rhs);
      },
      py::arg("method"), py::arg("A"), py::arg("x0"), py::arg("kind"), py::arg("p"), py::arg("n"));

  m.def("arenstorf_rhs", &arenstorf::rhs, py::arg("state"));
  m.def("arenstorf_initial_state", &arenstorf::initial_state);
  m.attr("ARENSTORF_PERIOD") = arenstorf::kPeriod;
  m.attr("ARENSTORF_MU") = arenstorf::kMu;

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
