#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "cxgrid/grid.hpp"
#include "cxgrid/rk.hpp"

namespace cxgrid {

struct OrderResiduals {
  double consistency;  ///< |sum sigma - 1|
  double power_sum;    ///< |sum sigma^(p+1)|
};

OrderResiduals order_condition_residuals(std::span<const Complex> sigma, int p);

/// Complex coefficients sigma_1..sigma_k of a k-term composition
/// Psi^{sigma_k h} o ... o Psi^{sigma_1 h} raising a base order p by gain g.
class CompositionSchedule {
 public:
  /// Throws DomainError unless k >= 2 and both order conditions hold within tol.
  CompositionSchedule(std::vector<Complex> sigma, int base_order, int gain = 1, double tol = 1e-12);

  std::span<const Complex> sigma() const noexcept { return sigma_; }
  int size() const noexcept { return static_cast<int>(sigma_.size()); }
  int base_order() const noexcept { return base_order_; }
  int gain() const noexcept { return gain_; }

  OrderResiduals residuals() const { return order_condition_residuals(sigma_, base_order_); }

 private:
  std::vector<Complex> sigma_;
  int base_order_;
  int gain_;
};

/// sigma_l = steps of the k-point discretization of the (p+1)-th circle segment from 0 to 1.
CompositionSchedule schedule_from_path(int p, int k, int gain = 1);

/// { p, k, g, sigma: [[re, im], ...] }
nlohmann::json schedule_to_json(const CompositionSchedule& sched);
CompositionSchedule schedule_from_json(const nlohmann::json& j);

/// Grid t, t + sigma_1 h, ..., t + h, with the last node pinned to t + h.
TimeGrid micro_grid(const CompositionSchedule& sched, Complex t, Complex h);

/// One macro step of size h. Micro step l starts at t + h * (sigma_1 + ... + sigma_{l-1}).
/// Failures are rethrown as StepError carrying the micro index.
CVector compose_step(const ButcherTableau& tab, const CompositionSchedule& sched, const Rhs& f, Complex t,
                     Complex h, const CVector& x);

/// r-fold iteration of the composition over a base tableau; realized as the base
/// method applied along fractal_grid.
class IteratedMethod {
 public:
  IteratedMethod(ButcherTableau base, int k, int r, int gain);

  const ButcherTableau& base() const noexcept { return base_; }
  int k() const noexcept { return k_; }
  int depth() const noexcept { return r_; }
  int gain() const noexcept { return gain_; }
  /// p + r g.
  int order() const noexcept { return base_.order() + r_ * gain_; }
  /// k^r micro steps per macro step.
  std::size_t micro_steps() const noexcept { return micro_offsets_.size() - 1; }

  /// Micro grid of one macro step from t0 of size h.
  TimeGrid grid(Complex t0, Complex h) const;

  /// Concatenated micro grids of n_macro macro steps of size h; macro node m is
  /// pinned to t0 + m h and sits at index m * micro_steps().
  TimeGrid macro_grid(Complex t0, Complex h, int n_macro) const;

  /// One macro step.
  CVector step(const Rhs& f, Complex t, Complex h, const CVector& x) const;

  /// Micro node offsets of the normalized grid (t0 = 0, h = 1).
  std::span<const Complex> micro_offsets() const noexcept { return micro_offsets_; }

 private:
  ButcherTableau base_;
  int k_;
  int r_;
  int gain_;
  /// Micro node offsets of the normalized grid (t0 = 0, h = 1).
  std::vector<Complex> micro_offsets_;
};

/// What happens to the imaginary part of the state between macro steps.
enum class ImagPolicy {
  Keep,         ///< the state stays complex
  ProjectReal,  ///< the real part is taken after every macro step
};

/// Macro-node trajectory of repeated macro steps.
struct MacroRun {
  /// Values on the macro nodes t0 + m h.
  GridFunction trajectory;
  /// Imaginary-part norm of each macro step result before any projection; one
  /// entry per macro node (0 for the initial node).
  std::vector<double> im_norms;
};

/// n_macro macro steps of size h. Failures are rethrown as StepError carrying
/// the macro index.
MacroRun integrate_macro(const IteratedMethod& method, const Rhs& f, Complex t0, Complex h, int n_macro,
                         const CVector& x0, ImagPolicy policy);

/// g defaults to 2 for tableaus flagged symmetric, 1 otherwise.
IteratedMethod iterate_method(const ButcherTableau& tab, int k, int r, std::optional<int> gain = std::nullopt);

}  // namespace cxgrid
