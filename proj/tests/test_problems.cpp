#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "cxgrid/errors.hpp"
#include "cxgrid/problems.hpp"
#include "test_support.hpp"

using namespace cxgrid;
using cxgrid::test::max_abs;

namespace {

CVector state(Complex x1, Complex x2, Complex v1, Complex v2) {
  CVector s(4);
  s << x1, x2, v1, v2;
  return s;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(CXGRID_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("make_linear examples") {
  const IVProblem e = make_linear(CMatrix::Ones(1, 1), 0.0, CVector::Ones(1));
  CHECK(e.is_linear());
  CHECK(std::abs(e.exact_flow(0.0, 1.0, e.x0)[0] - std::numbers::e) <= 1e-14);
  CHECK(std::abs(exponential_problem().exact_flow(0.0, 1.0, CVector::Ones(1))[0] - std::numbers::e) <= 1e-14);

  CVector x0(3);
  x0 << 1.0, Complex{2.0, -1.0}, 3.0;
  const IVProblem zero = make_linear(CMatrix::Zero(3, 3), {1.0, 1.0}, x0);
  CHECK(max_abs(zero.exact_flow({1.0, 1.0}, {5.0, -2.0}, x0) - x0) == 0.0);
  CHECK(max_abs(zero.rhs(0.0, x0)) == 0.0);

  const IVProblem rot = builtin_problem("rotation");
  const CVector quarter = rot.exact_flow(0.0, std::numbers::pi / 2.0, rot.x0);
  CHECK(std::abs(quarter[0]) <= 1e-15);
  CHECK(std::abs(quarter[1] + 1.0) <= 1e-15);
  for (double t = 0.0; t < 7.0; t += 0.37) {
    const CVector x = rot.exact_flow(0.0, t, rot.x0);
    CHECK(std::abs(x[0] - std::cos(t)) <= 1e-14);
    CHECK(std::abs(x[1] + std::sin(t)) <= 1e-14);
  }

  CHECK_THROWS_AS(make_linear(CMatrix::Zero(2, 3), 0.0, CVector::Zero(2)), DimensionError);
  CHECK_THROWS_AS(make_linear(CMatrix::Zero(2, 2), 0.0, CVector::Zero(3)), DimensionError);
}

TEST_CASE("problem registry and JSON") {
  CHECK(builtin_problem("exp").dimension() == 1);
  CHECK(builtin_problem("rotation").dimension() == 2);
  CHECK(builtin_problem("arenstorf").dimension() == 4);
  CHECK_FALSE(builtin_problem("arenstorf").is_linear());
  CHECK_THROWS_AS(builtin_problem("lorenz"), DomainError);

  const IVProblem rot = builtin_problem("rotation");
  const IVProblem back = linear_problem_from_json(linear_problem_to_json(rot));
  CHECK(max_abs(*back.matrix - *rot.matrix) == 0.0);
  CHECK(max_abs(back.x0 - rot.x0) == 0.0);
  const auto j = nlohmann::json::parse(R"({"A": [[[0, 1]]], "t0": [0.5, 0], "x0": [1]})");
  const IVProblem spin = linear_problem_from_json(j);
  CHECK(spin.t0 == Complex{0.5, 0.0});
  CHECK(std::abs(spin.exact_flow(0.0, std::numbers::pi, spin.x0)[0] + 1.0) <= 1e-15);
  CHECK_THROWS_AS(linear_problem_from_json(nlohmann::json::parse(R"({"A": [[1]]})")), std::invalid_argument);
  CHECK_THROWS_AS(linear_problem_to_json(builtin_problem("arenstorf")), DomainError);
}

TEST_CASE("Arenstorf right-hand side examples") {
  using namespace arenstorf;
  for (const double x1 : {-1.2, -0.5, 0.3, 0.9, 1.4}) {
    const CVector d = rhs(state(x1, 0.0, 0.0, 0.7));
    CHECK(d[3] == Complex{0.0, 0.0});
    CHECK(d[1] == Complex{0.7, 0.0});
  }
  // 40-digit evaluation of the acceleration at the initial state.
  const CVector d0 = rhs(initial_state());
  CHECK(d0[2].real() == doctest::Approx(-315.5430234888805781).epsilon(1e-13));
  CHECK(d0[2].imag() == 0.0);
  CHECK(d0[3] == Complex{0.0, 0.0});
  CHECK(d0[0] == Complex{0.0, 0.0});

  try {
    rhs(state(-kMu, 0.0, 0.0, 0.0));
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.body() == 0);
  }
  try {
    rhs(state(kMuHat, 0.0, 1.0, 0.0));
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(e.body() == 1);
  }
  CHECK_THROWS_AS(rhs(CVector::Zero(3)), DimensionError);
  CHECK(kMu + kMuHat == 1.0);
}

TEST_CASE("Arenstorf real states stay real") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const CVector s = state(u(rng), u(rng), u(rng), u(rng));
    const CVector d = arenstorf::rhs(s);
    for (int i = 0; i < 4; ++i) CHECK(d[i].imag() == 0.0);
    CHECK(arenstorf::branch_proximity(s) == 0.0);
  }
  CHECK(arenstorf::branch_proximity(state(Complex{0.5, 0.1}, 0.0, 0.0, 0.0)) > 0.0);
}

TEST_CASE("Arenstorf finite differences agree with the complex-step derivative") {
  const GridFunction ref = arenstorf::reference(arenstorf::kMinReferenceSteps);
  const double h_fd = 1e-6;
  const double h_cs = 1e-20;
  for (int sample = 0; sample < 10; ++sample) {
    const CVector x = ref.values[static_cast<std::size_t>(sample) * 1000 + 137].real().cast<Complex>();
    for (int j = 0; j < 4; ++j) {
      CVector plus = x, minus = x, probe = x;
      plus[j] += h_fd;
      minus[j] -= h_fd;
      probe[j] += Complex{0.0, h_cs};
      const Eigen::VectorXd fd = ((arenstorf::rhs(plus) - arenstorf::rhs(minus)) / (2.0 * h_fd)).real();
      const Eigen::VectorXd cs = arenstorf::rhs(probe).imag() / h_cs;
      CHECK(fd.allFinite());
      CHECK((fd - cs).norm() <= 1e-6 * std::max(1.0, cs.norm()));
    }
  }
}

TEST_CASE("Arenstorf reference orbit") {
  CHECK_THROWS_AS(arenstorf::reference(arenstorf::kMinReferenceSteps - 1), DomainError);
  const GridFunction ref = arenstorf::reference(100000);
  REQUIRE(ref.values.size() == 100001);
  CHECK(ref.grid.end() == Complex{arenstorf::kPeriod, 0.0});
  CHECK((ref.terminal() - arenstorf::initial_state()).norm() <= 1e-6);
  CHECK(arenstorf::position_error(ref.terminal(), arenstorf::initial_state()) <= 1e-8);

  // Half a period lands on the x1-axis again.
  const TimeGrid half = discretize(PathSpec::segment(0.0, arenstorf::kPeriod / 2.0), 10000);
  const CVector mid = integrate(tableaus::dopri5(), arenstorf::problem().rhs, half, arenstorf::initial_state()).terminal();
  CHECK(std::abs(mid[1]) <= 1e-3);
}

TEST_CASE("Arenstorf reference cache") {
  const auto dir = fresh_dir("arenstorf_cache");
  const GridFunction first = arenstorf::reference(10000, dir);
  const auto file = dir / "arenstorf_dopri5_10000.bin";
  REQUIRE(std::filesystem::exists(file));
  CHECK(std::filesystem::file_size(file) == 10001 * 8 * sizeof(double));
  const GridFunction second = arenstorf::reference(10000, dir);
  for (std::size_t j = 0; j < first.values.size(); j += 997) CHECK(max_abs(first.values[j] - second.values[j]) == 0.0);

  // A truncated file is recomputed and rewritten.
  std::filesystem::resize_file(file, 100);
  const GridFunction third = arenstorf::reference(10000, dir);
  CHECK(max_abs(third.terminal() - first.terminal()) == 0.0);
  CHECK(std::filesystem::file_size(file) == 10001 * 8 * sizeof(double));
  std::filesystem::remove_all(dir);
}

TEST_CASE("Arenstorf benchmark runs") {
  using namespace arenstorf;
  CHECK(parse_variant("plain-euler") == Variant::PlainEuler);
  CHECK(parse_variant("composed-euler") == Variant::ComposedEuler);
  CHECK(parse_variant("reference") == Variant::Reference);
  CHECK_THROWS_AS(parse_variant("rk4"), DomainError);

  const BenchmarkRun plain = run(Variant::PlainEuler, 2000);
  REQUIRE(plain.trajectory.values.size() == 2001);
  CHECK(plain.trajectory.grid.end() == Complex{kPeriod, 0.0});
  CHECK(plain.max_branch_proximity == 0.0);
  for (const double im : plain.im_norms) CHECK(im == 0.0);

  const BenchmarkRun composed = run(Variant::ComposedEuler, 2000, 2, ImagPolicy::Keep);
  CHECK(composed.max_branch_proximity > 0.0);
  CHECK(composed.im_norms.back() > 0.0);
  const BenchmarkRun projected = run(Variant::ComposedEuler, 2000);
  CHECK(projected.trajectory.terminal().imag().norm() == 0.0);
  CHECK_THROWS_AS(run(Variant::PlainEuler, 0), DomainError);
}

TEST_CASE("position_error") {
  const CVector a = state(Complex{1.0, 5.0}, 2.0, 100.0, 100.0);
  const CVector b = state(4.0, 6.0, -3.0, 0.0);
  CHECK(arenstorf::position_error(a, b) == 5.0);
}
