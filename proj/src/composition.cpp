#include "cxgrid/composition.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "cxgrid/errors.hpp"
#include "cxgrid/io.hpp"

namespace cxgrid {

OrderResiduals order_condition_residuals(std::span<const Complex> sigma, int p) {
  Complex sum{0.0, 0.0};
  Complex power_sum{0.0, 0.0};
  for (const Complex s : sigma) {
    sum += s;
    power_sum += std::pow(s, p + 1);
  }
  return {std::abs(sum - 1.0), std::abs(power_sum)};
}

CompositionSchedule::CompositionSchedule(std::vector<Complex> sigma, int base_order, int gain, double tol)
    : sigma_(std::move(sigma)), base_order_(base_order), gain_(gain) {
  if (sigma_.size() < 2) throw DomainError("composition schedule needs k >= 2 coefficients");
  if (base_order_ < 1) throw DomainError("composition schedule: base order must be >= 1");
  if (gain_ < 1) throw DomainError("composition schedule: gain must be >= 1");
  const auto res = residuals();
  if (!(res.consistency <= tol) || !(res.power_sum <= tol)) {
    throw DomainError("composition schedule violates the order conditions (|sum - 1| = " +
                      io::format_double(res.consistency) + ", |sum sigma^(p+1)| = " +
                      io::format_double(res.power_sum) + ")");
  }
}

CompositionSchedule schedule_from_path(int p, int k, int gain) {
  if (k < 2) throw DomainError("schedule_from_path: k must be >= 2");
  return CompositionSchedule(normalized_circle_steps(p, k), p, gain);
}

nlohmann::json schedule_to_json(const CompositionSchedule& sched) {
  auto sigma = nlohmann::json::array();
  for (const Complex s : sched.sigma()) sigma.push_back(io::to_json(s));
  return {{"p", sched.base_order()}, {"k", sched.size()}, {"g", sched.gain()}, {"sigma", std::move(sigma)}};
}

CompositionSchedule schedule_from_json(const nlohmann::json& j) {
  try {
    std::vector<Complex> sigma;
    for (const auto& s : j.at("sigma")) sigma.push_back(io::complex_from_json(s));
    if (j.contains("k") && j.at("k").get<std::size_t>() != sigma.size()) {
      throw DimensionError("schedule JSON: k does not match the number of coefficients");
    }
    return CompositionSchedule(std::move(sigma), j.at("p").get<int>(), j.value("g", 1));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("schedule JSON: ") + e.what());
  }
}

TimeGrid micro_grid(const CompositionSchedule& sched, Complex t, Complex h) {
  std::vector<Complex> nodes{t};
  Complex partial{0.0, 0.0};
  for (const Complex s : sched.sigma()) {
    partial += s;
    nodes.push_back(t + partial * h);
  }
  nodes.back() = t + h;
  return TimeGrid(std::move(nodes));
}

CVector compose_step(const ButcherTableau& tab, const CompositionSchedule& sched, const Rhs& f, Complex t,
                     Complex h, const CVector& x) {
  CVector y = x;
  Complex partial{0.0, 0.0};
  const auto sigma = sched.sigma();
  for (std::size_t l = 0; l < sigma.size(); ++l) {
    try {
      y = rk_step(tab, f, t + partial * h, sigma[l] * h, y);
    } catch (const std::exception& e) {
      std::throw_with_nested(StepError("micro step " + std::to_string(l) + " failed: " + e.what(), l));
    }
    partial += sigma[l];
  }
  return y;
}

IteratedMethod::IteratedMethod(ButcherTableau base, int k, int r, int gain)
    : base_(std::move(base)), k_(k), r_(r), gain_(gain) {
  const TimeGrid unit = fractal_grid(base_.order(), gain_, k_, r_, {0.0, 0.0}, {1.0, 0.0});
  micro_offsets_.assign(unit.nodes().begin(), unit.nodes().end());
  micro_offsets_.back() = {1.0, 0.0};
}

TimeGrid IteratedMethod::grid(Complex t0, Complex h) const {
  return fractal_grid(base_.order(), gain_, k_, r_, t0, h);
}

TimeGrid IteratedMethod::macro_grid(Complex t0, Complex h, int n_macro) const {
  if (n_macro < 1) throw DomainError("macro_grid: need at least one macro step");
  const std::size_t m = micro_steps();
  std::vector<Complex> nodes;
  nodes.reserve(static_cast<std::size_t>(n_macro) * m + 1);
  nodes.push_back(t0);
  for (int step = 0; step < n_macro; ++step) {
    const Complex base = t0 + static_cast<double>(step) * h;
    for (std::size_t l = 1; l < m; ++l) nodes.push_back(base + micro_offsets_[l] * h);
    nodes.push_back(t0 + static_cast<double>(step + 1) * h);
  }
  return TimeGrid(std::move(nodes));
}

CVector IteratedMethod::step(const Rhs& f, Complex t, Complex h, const CVector& x) const {
  CVector y = x;
  for (std::size_t l = 0; l + 1 < micro_offsets_.size(); ++l) {
    const Complex start = t + micro_offsets_[l] * h;
    const Complex stop = l + 2 == micro_offsets_.size() ? t + h : t + micro_offsets_[l + 1] * h;
    y = rk_step(base_, f, start, stop - start, y);
  }
  return y;
}

MacroRun integrate_macro(const IteratedMethod& method, const Rhs& f, Complex t0, Complex h, int n_macro,
                         const CVector& x0, ImagPolicy policy) {
  if (n_macro < 1) throw DomainError("integrate_macro: need at least one macro step");
  std::vector<Complex> nodes;
  std::vector<CVector> values;
  std::vector<double> im_norms;
  nodes.reserve(static_cast<std::size_t>(n_macro) + 1);
  values.reserve(static_cast<std::size_t>(n_macro) + 1);
  im_norms.reserve(static_cast<std::size_t>(n_macro) + 1);
  nodes.push_back(t0);
  values.push_back(x0);
  im_norms.push_back(0.0);
  for (int m = 0; m < n_macro; ++m) {
    const Complex t = t0 + static_cast<double>(m) * h;
    CVector y;
    try {
      y = method.step(f, t, h, values.back());
    } catch (const std::exception& e) {
      std::throw_with_nested(
          StepError("macro step " + std::to_string(m) + " failed: " + e.what(), static_cast<std::size_t>(m)));
    }
    im_norms.push_back(imag_norm(y));
    if (policy == ImagPolicy::ProjectReal) y = y.real().cast<Complex>();
    nodes.push_back(t0 + static_cast<double>(m + 1) * h);
    values.push_back(std::move(y));
  }
  return MacroRun{GridFunction{TimeGrid(std::move(nodes)), std::move(values)}, std::move(im_norms)};
}

IteratedMethod iterate_method(const ButcherTableau& tab, int k, int r, std::optional<int> gain) {
  const int g = gain.value_or(tab.symmetric() ? 2 : 1);
  return IteratedMethod(tab, k, r, g);
}

}  // namespace cxgrid
