#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cxgrid/analysis.hpp"
#include "cxgrid/errors.hpp"
#include "test_support.hpp"

using namespace cxgrid;
using cxgrid::test::random_matrix;
using cxgrid::test::random_vector;

namespace {

constexpr double kE = std::numbers::e;

ConvergenceStudy synthetic(const std::vector<int>& n, const std::vector<double>& err) {
  ConvergenceStudy s;
  s.n_values = n;
  s.errors = err;
  s.deltas.assign(n.size(), 0.0);
  s.im_norms.assign(n.size(), 0.0);
  return s;
}

GridFamily circle_family(int p, bool conjugated = false) {
  return [=](int n) { return discretize(PathSpec::circle(0.0, 1.0, p, conjugated), n); };
}

GridFamily real_family() {
  return [](int n) { return discretize(PathSpec::segment(0.0, 1.0), n); };
}

const std::vector<int> kDoubling{10, 20, 40, 80, 160, 320};

}  // namespace

TEST_CASE("terminal_error examples") {
  const auto euler = builtin_tableau("euler");
  const IVProblem exp = exponential_problem();
  const GridFunction real = integrate(euler, exp.rhs, real_family()(10), exp.x0);
  CHECK(std::abs(terminal_error(real, exp) - (kE - std::pow(1.1, 10))) <= 1e-14);
  CHECK(std::abs(terminal_error(real, exp) - 0.1245394) <= 5e-8);

  const GridFunction circ = integrate(euler, exp.rhs, circle_family(1)(10), exp.x0);
  CHECK(std::abs(terminal_error(circ, exp) - 0.0075590) <= 5e-8);
  CHECK(terminal_error(real, exp) / terminal_error(circ, exp) > 16.0);

  // The exact trajectory has zero error.
  GridFunction exact = real;
  for (std::size_t j = 0; j < exact.values.size(); ++j) {
    exact.values[j] = exp.exact_flow(0.0, exact.grid.node(j), exp.x0);
  }
  CHECK(terminal_error(exact, exp) == 0.0);

  CHECK_THROWS_AS(terminal_error(real, arenstorf::problem()), NoReferenceError);
  CVector ref(1);
  ref << Complex{3.0, 4.0};
  CVector x(1);
  x << Complex{0.0, 0.0};
  GridFunction single{TimeGrid({0.0, 1.0}), {x, x}};
  CHECK(terminal_error(single, ref) == 5.0);
}

TEST_CASE("fit_order on fabricated data") {
  std::vector<double> err;
  for (const int n : kDoubling) err.push_back(3.0 / (static_cast<double>(n) * n));
  auto s = synthetic(kDoubling, err);
  fit_order(s);
  CHECK(s.fitted_slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.fit_begin == 0);
  CHECK(s.fit_end == 6);

  // A non-monotone head is dropped.
  auto head = synthetic(kDoubling, {1e-3, 1e-3, 1e-3, 1e-3 / 8, 1e-3 / 64, 1e-3 / 512});
  fit_order(head);
  CHECK(head.fit_begin == 2);
  CHECK(head.fitted_slope == doctest::Approx(3.0).epsilon(1e-12));

  // Errors at the rounding floor end the window.
  auto floor = synthetic(kDoubling, {1e-8, 1e-10, 1e-12, 1e-14, 1e-12, 1e-16});
  fit_order(floor);
  CHECK(floor.fit_end == 3);
  CHECK(floor.fitted_slope == doctest::Approx(2.0 / std::log10(2.0)).epsilon(1e-12));

  auto noise = synthetic(kDoubling, {1e-14, 1e-15, 1e-16, 1e-16, 0.0, 1e-15});
  CHECK_THROWS_AS(fit_order(noise), IndeterminateOrderError);
  auto flat = synthetic({10, 20, 40, 80}, {1e-3, 1e-3, 1e-3, 1e-3});
  CHECK_THROWS_AS(fit_order(flat), IndeterminateOrderError);
}

TEST_CASE("estimate_order slopes on x' = x") {
  const IVProblem exp = exponential_problem();
  const auto euler = builtin_tableau("euler");
  const auto real = estimate_order(euler, exp, real_family(), kDoubling);
  CHECK(real.fitted_slope >= 0.9);
  CHECK(real.fitted_slope <= 1.1);
  REQUIRE(real.errors.size() == 6);
  CHECK(real.deltas[0] == doctest::Approx(0.1));
  for (const double im : real.im_norms) CHECK(im == 0.0);

  for (const bool conj : {false, true}) {
    const auto circ = estimate_order(euler, exp, circle_family(1, conj), kDoubling);
    CHECK(circ.fitted_slope >= 1.9);
    CHECK(circ.fitted_slope <= 2.1);
    const auto heun = estimate_order(builtin_tableau("heun"), exp, circle_family(2, conj), kDoubling);
    CHECK(heun.fitted_slope >= 2.8);
  }
  for (int p = 1; p <= 2; ++p) {
    const auto tab = builtin_tableau(p == 1 ? "euler" : "heun");
    CHECK(estimate_order(tab, exp, circle_family(p), kDoubling).fitted_slope >= p + 0.8);
  }
  const auto rot = estimate_order(builtin_tableau("rk4"), builtin_problem("rotation"),
                                  [](int n) { return discretize(PathSpec::segment(0.0, 2.0), n); }, {4, 8, 16, 32});
  CHECK(rot.fitted_slope == doctest::Approx(4.0).epsilon(0.05));

  CHECK_THROWS_AS(estimate_order(euler, exp, real_family(), {10, 20, 40}), DomainError);
  CHECK_THROWS_AS(estimate_order(euler, exp, real_family(), {10, 20, 20, 40}), DomainError);
  CHECK_THROWS_AS(estimate_order(euler, arenstorf::problem(), real_family(), {10, 20, 40, 80}), NoReferenceError);
}

TEST_CASE("main_theorem_ratio for Euler on the real segment") {
  const CMatrix A = CMatrix::Ones(1, 1);
  const CVector x0 = CVector::Ones(1);
  double previous = INFINITY;
  for (const int n : {64, 128, 256, 512}) {
    const auto r = main_theorem_ratio(builtin_tableau("euler"), A, x0, PathSpec::segment(0.0, 1.0), n);
    // Oracle: eps_n = e - (1 + 1/n)^n, delta = 1/n, sum tau^2 = 1/n.
    const double lhs = n * (kE - std::pow(1.0 + 1.0 / n, n));
    CHECK(std::abs(r.lhs[0] - lhs) <= 1e-10 * lhs);
    CHECK(std::abs(r.rhs[0] - kE / 2.0) <= 1e-13);
    CHECK(r.delta == doctest::Approx(1.0 / n));
    const double rel = (r.lhs - r.rhs).norm() / r.rhs.norm();
    CHECK(rel < previous);
    previous = rel;
  }
  CHECK(previous <= 0.05);
}

TEST_CASE("main_theorem_ratio on superconvergent paths") {
  const CMatrix A = CMatrix::Ones(1, 1);
  const CVector x0 = CVector::Ones(1);
  const auto r = main_theorem_ratio(builtin_tableau("euler"), A, x0, PathSpec::circle(0.0, 1.0, 1), 512);
  CHECK(r.rhs.norm() <= 1e-12);
  CHECK(r.lhs.norm() <= 0.02 * (kE / 2.0));
  for (int p = 1; p <= 4; ++p) {
    const auto tab = builtin_tableau(p == 1 ? "euler" : p == 2 ? "heun" : "rk4");
    const auto q = main_theorem_ratio(tab, A, x0, PathSpec::circle(0.0, 1.0, tab.order()), 64);
    CHECK(q.rhs.norm() <= 1e-10);
  }
}

TEST_CASE("main_theorem_ratio bracket uses the next stability coefficient") {
  const CMatrix A = CMatrix::Constant(1, 1, 0.5);
  const CVector x0 = CVector::Ones(1);
  // RK4 has s = p, so the bracket is A^5 / 5!.
  const auto rk4 = main_theorem_ratio(builtin_tableau("rk4"), A, x0, PathSpec::segment(0.0, 1.0), 8);
  const double expected_rk4 = std::pow(0.5, 5) / 120.0 * std::exp(0.5) * 8.0 * std::pow(1.0 / 8.0, 5) / std::pow(1.0 / 8.0, 4);
  CHECK(std::abs(rk4.rhs[0] - expected_rk4) <= 1e-15);
  CHECK(std::abs(rk4.lhs[0] - rk4.rhs[0]) <= 0.1 * std::abs(rk4.rhs[0]));
  // Dormand-Prince has p_6 = 1/600, so the bracket is A^6 (1/720 - 1/600).
  const auto dp = main_theorem_ratio(builtin_tableau("dopri5"), A, x0, PathSpec::segment(0.0, 1.0), 16);
  const double expected_dp = std::pow(0.5, 6) * (1.0 / 720.0 - 1.0 / 600.0) * std::exp(0.5) * 16.0 *
                             std::pow(1.0 / 16.0, 6) / std::pow(1.0 / 16.0, 5);
  CHECK(std::abs(dp.rhs[0] - expected_dp) <= 1e-15);
  CHECK(std::abs(dp.lhs[0] - dp.rhs[0]) <= 0.1 * std::abs(dp.rhs[0]));
}

TEST_CASE("reality_report") {
  const auto euler = builtin_tableau("euler");
  const IVProblem exp = exponential_problem();
  const auto real = reality_report(integrate(euler, exp.rhs, real_family()(10), exp.x0));
  CHECK(real.terminal_im_norm == 0.0);
  CHECK(real.max_node_im_norm == 0.0);

  const GridFunction circ = integrate(euler, exp.rhs, circle_family(1)(10), exp.x0);
  const auto rep = reality_report(circ);
  CHECK(rep.terminal_im_norm <= 1e-8);
  CHECK(std::abs(circ.values[6][0].imag() - 0.8108906981) <= 1e-8);
  CHECK(rep.max_node_im_norm >= 0.8108906981 - 1e-8);
  CHECK(rep.max_node_im_norm <= 0.88);
}

TEST_CASE("terminal values on symmetric circle grids are real") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> steps(2, 40);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = dim(rng);
    const CMatrix A = random_matrix(rng, d, 1.0, true);
    const CVector x0 = random_vector(rng, d, true);
    const IVProblem prob = make_linear(A, 0.0, x0);
    for (int p = 1; p <= 3; ++p) {
      for (const auto& name : builtin_tableau_names()) {
        const auto gf = integrate(builtin_tableau(name), prob.rhs,
                                  discretize(PathSpec::circle(-0.5, 1.5, p), steps(rng)), x0);
        const auto rep = reality_report(gf);
        CHECK(rep.terminal_im_norm <= 1e-10 * (1.0 + gf.terminal().norm()));
      }
    }
  }
}

TEST_CASE("study CSV") {
  auto s = synthetic({10, 20, 40, 80}, {1e-2, 5e-3, 2.5e-3, 1.25e-3});
  s.deltas = {0.1, 0.05, 0.025, 0.0125};
  fit_order(s);
  std::ostringstream out;
  write_study_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,delta_n,error,im_norm");
  std::getline(in, line);
  CHECK(line == "10,1.0000000000000001e-01,1.0000000000000000e-02,0.0000000000000000e+00");
  int rows = 1;
  while (std::getline(in, line) && line[0] != '#') ++rows;
  CHECK(rows == 4);
  CHECK(line == "# slope=1.0000000000000000e+00 fit_window=[0,4)");
}
