#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxgrid/grid.hpp"
#include "cxgrid/numerics.hpp"

namespace cxgrid {

/// Right-hand side f(t, x) of x' = f(t, x).
using Rhs = std::function<CVector(Complex t, const CVector& x)>;

struct Rational {
  long long num = 0;
  long long den = 1;
};

/// Rational coefficients of a real tableau, kept so the stability polynomial
/// can be formed without rounding.
struct ExactCoefficients {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
};

/// Coefficients of an explicit Runge-Kutta method; entries may be complex.
class ButcherTableau {
 public:
  /// Validates shapes, strict lower triangularity, finiteness and 1 <= order <= s.
  ButcherTableau(std::string name, CMatrix A, CVector b, CVector c, int order, bool symmetric = false,
                 std::optional<ExactCoefficients> exact = std::nullopt);

  /// Builds a real tableau from rational entries; A is given by its rows.
  static ButcherTableau from_rationals(std::string name, const std::vector<std::vector<Rational>>& A,
                                       const std::vector<Rational>& b, const std::vector<Rational>& c,
                                       int order);

  const std::string& name() const noexcept { return name_; }
  int stages() const noexcept { return static_cast<int>(b_.size()); }
  const CMatrix& A() const noexcept { return A_; }
  const CVector& b() const noexcept { return b_; }
  const CVector& c() const noexcept { return c_; }
  int order() const noexcept { return order_; }
  bool symmetric() const noexcept { return symmetric_; }
  const std::optional<ExactCoefficients>& exact() const noexcept { return exact_; }

  /// True when every coefficient has zero imaginary part.
  bool is_real() const;

 private:
  std::string name_;
  CMatrix A_;
  CVector b_;
  CVector c_;
  int order_;
  bool symmetric_;
  std::optional<ExactCoefficients> exact_;
};

namespace tableaus {
ButcherTableau euler();
ButcherTableau heun();
ButcherTableau rk4();
/// Dormand-Prince 5(4), fifth-order weights only (no embedded estimate).
ButcherTableau dopri5();
}  // namespace tableaus

/// Looks up "euler", "heun", "rk4" or "dopri5"; throws DomainError otherwise.
ButcherTableau builtin_tableau(const std::string& name);
std::vector<std::string> builtin_tableau_names();

/// JSON layout { s, A (flat row-major), b, c, order, symmetric } with complex
/// entries as [re, im]. Nested rows are accepted for A on input.
nlohmann::json tableau_to_json(const ButcherTableau& tab);
ButcherTableau tableau_from_json(const nlohmann::json& j, std::string name = "custom");

/// Values of the discrete solution on every node of a grid.
struct GridFunction {
  TimeGrid grid;
  std::vector<CVector> values;

  const CVector& terminal() const { return values.back(); }
};

/// One explicit RK step from (t, x) with complex step tau.
CVector rk_step(const ButcherTableau& tab, const Rhs& f, Complex t, Complex tau, const CVector& x);

/// Steps through the whole grid. A failure inside step j is rethrown as a
/// StepError carrying j, with the original exception nested.
GridFunction integrate(const ButcherTableau& tab, const Rhs& f, const TimeGrid& grid, const CVector& x0);

/// Coefficients p_0..p_s of P(z) with Psi x = P(tau A) x on x' = A x.
std::vector<Complex> stability_polynomial(const ButcherTableau& tab);

/// P(tau A).
CMatrix linear_step_matrix(const ButcherTableau& tab, const CMatrix& A, Complex tau);

}  // namespace cxgrid
