#include "cxgrid/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cxgrid/errors.hpp"
#include "cxgrid/io.hpp"

namespace cxgrid {

double terminal_error(const GridFunction& gf, const IVProblem& problem) {
  if (!problem.exact_flow) throw NoReferenceError("problem '" + problem.name + "' has no exact flow");
  const CVector exact = problem.exact_flow(gf.grid.start(), gf.grid.end(), gf.values.front());
  return (exact - gf.terminal()).norm();
}

double terminal_error(const GridFunction& gf, const CVector& reference) {
  if (reference.size() != gf.terminal().size()) throw DimensionError("terminal_error: reference dimension");
  return (reference - gf.terminal()).norm();
}

void fit_order(ConvergenceStudy& study) {
  const auto& errs = study.errors;
  std::size_t end = 0;
  while (end < errs.size() && std::isfinite(errs[end]) && errs[end] > kRoundingFloor) ++end;
  if (end < 2) throw IndeterminateOrderError("fewer than two errors above the rounding floor");
  std::size_t begin = end - 1;
  while (begin > 0 && errs[begin - 1] > errs[begin]) --begin;
  if (end - begin < 2) throw IndeterminateOrderError("no decreasing error window to fit");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto m = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double x = -std::log(static_cast<double>(study.n_values[i]));
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  study.fit_begin = begin;
  study.fit_end = end;
}

ConvergenceStudy estimate_order(const ButcherTableau& tab, const IVProblem& problem, const GridFamily& family,
                                const std::vector<int>& n_values) {
  if (n_values.size() < 4) throw DomainError("estimate_order needs at least four n-values");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1 || (i > 0 && n_values[i] <= n_values[i - 1])) {
      throw DomainError("estimate_order: n-values must be positive and strictly increasing");
    }
  }
  ConvergenceStudy study;
  study.n_values = n_values;
  for (const int n : n_values) {
    const TimeGrid grid = family(n);
    const GridFunction gf = integrate(tab, problem.rhs, grid, problem.x0);
    study.deltas.push_back(grid.max_step());
    study.errors.push_back(terminal_error(gf, problem));
    study.im_norms.push_back(imag_norm(gf.terminal()));
  }
  fit_order(study);
  return study;
}

TheoremRatio main_theorem_ratio(const ButcherTableau& tab, const CMatrix& A, const CVector& x0,
                                const PathSpec& path, int n) {
  const IVProblem problem = make_linear(A, path.t0, x0);
  const TimeGrid grid = discretize(path, n);
  const GridFunction gf = integrate(tab, problem.rhs, grid, x0);

  const int p = tab.order();
  const Complex elapsed = grid.end() - grid.start();
  const CMatrix flow = mat_exp(elapsed * A);
  const CVector error = flow * x0 - gf.terminal();
  const double delta = grid.max_step();
  const double delta_p = std::pow(delta, p);

  Complex power_sum{0.0, 0.0};
  for (const Complex tau : grid.steps()) power_sum += std::pow(tau, p + 1);

  const auto coeffs = stability_polynomial(tab);
  const Complex c_next = static_cast<std::size_t>(p + 1) < coeffs.size() ? coeffs[static_cast<std::size_t>(p + 1)]
                                                                          : Complex{0.0, 0.0};
  const auto d = A.rows();
  CMatrix A_pow = CMatrix::Identity(d, d);
  double factorial = 1.0;
  for (int k = 1; k <= p + 1; ++k) {
    A_pow = A_pow * A;
    factorial *= k;
  }
  const CMatrix bracket = A_pow / factorial - c_next * A_pow;

  TheoremRatio out;
  out.lhs = error / delta_p;
  out.rhs = (power_sum / delta_p) * (flow * (bracket * x0));
  out.delta = delta;
  return out;
}

RealityReport reality_report(const GridFunction& gf) {
  RealityReport r;
  for (const auto& v : gf.values) r.max_node_im_norm = std::max(r.max_node_im_norm, imag_norm(v));
  r.terminal_im_norm = imag_norm(gf.terminal());
  return r;
}

void write_study_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "n,delta_n,error,im_norm\n";
  for (std::size_t i = 0; i < study.n_values.size(); ++i) {
    out << study.n_values[i] << ',' << io::format_double(study.deltas[i]) << ',' << io::format_double(study.errors[i])
        << ',' << io::format_double(study.im_norms[i]) << '\n';
  }
  out << "# slope=" << io::format_double(study.fitted_slope) << " fit_window=[" << study.fit_begin << ','
      << study.fit_end << ")\n";
}

}  // namespace cxgrid
