#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "cxgrid/grid.hpp"
#include "cxgrid/problems.hpp"
#include "cxgrid/rk.hpp"

namespace cxgrid {

/// Euclidean norm of exact_flow(t_0, t_n, x_0) - x(t_n). Throws NoReferenceError
/// when the problem has no exact flow.
double terminal_error(const GridFunction& gf, const IVProblem& problem);

/// Euclidean norm of reference - x(t_n).
double terminal_error(const GridFunction& gf, const CVector& reference);

/// One family of grids indexed by the step count n.
using GridFamily = std::function<TimeGrid(int n)>;

struct ConvergenceStudy {
  std::vector<int> n_values;
  std::vector<double> deltas;
  std::vector<double> errors;
  std::vector<double> im_norms;
  double fitted_slope = 0.0;
  /// Half-open index range [fit_begin, fit_end) used for the fit.
  std::size_t fit_begin = 0;
  std::size_t fit_end = 0;
};

/// Errors at or below this value are treated as rounding noise.
inline constexpr double kRoundingFloor = 1e-13;

/// Least-squares slope of log(error) against log(1/n). The window is the longest
/// strictly decreasing tail of the errors that precede the first one at the
/// rounding floor. Throws IndeterminateOrderError if it has fewer than two points.
void fit_order(ConvergenceStudy& study);

/// Integrates the problem on family(n) for each n and fits the terminal error.
/// Needs at least four strictly increasing n-values.
ConvergenceStudy estimate_order(const ButcherTableau& tab, const IVProblem& problem, const GridFamily& family,
                                const std::vector<int>& n_values);

/// Leading-term check for x' = A x: lhs = eps_n / delta_n^p from an actual run,
/// rhs = (sum tau_j^{p+1} / delta_n^p) exp((t - t0) A) [A^{p+1}/(p+1)! - C] x0 with
/// C = p_{p+1} A^{p+1} taken from the stability polynomial.
struct TheoremRatio {
  CVector lhs;
  CVector rhs;
  double delta = 0.0;
};

TheoremRatio main_theorem_ratio(const ButcherTableau& tab, const CMatrix& A, const CVector& x0,
                                const PathSpec& path, int n);

struct RealityReport {
  double terminal_im_norm = 0.0;
  double max_node_im_norm = 0.0;
};

RealityReport reality_report(const GridFunction& gf);

/// Columns n,delta_n,error,im_norm and a trailing "# slope=..." comment line.
void write_study_csv(std::ostream& out, const ConvergenceStudy& study);

}  // namespace cxgrid
