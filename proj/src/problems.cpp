#include "cxgrid/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

#include "cxgrid/errors.hpp"
#include "cxgrid/io.hpp"

namespace cxgrid {

IVProblem make_linear(const CMatrix& A, Complex t0, const CVector& x0, std::string name) {
  if (A.rows() != A.cols() || A.rows() == 0) throw DimensionError("make_linear: A must be square");
  if (A.rows() != x0.size()) throw DimensionError("make_linear: dim(A) != dim(x0)");
  if (!all_finite(A) || !all_finite(x0)) throw DomainError("make_linear: non-finite data");
  IVProblem p;
  p.name = std::move(name);
  p.rhs = [A](Complex, const CVector& x) -> CVector { return A * x; };
  p.t0 = t0;
  p.x0 = x0;
  p.matrix = A;
  p.exact_flow = [A](Complex s0, Complex s, const CVector& y0) { return exact_linear_flow(A, s0, s, y0); };
  return p;
}

IVProblem exponential_problem() {
  return make_linear(CMatrix::Ones(1, 1), {0.0, 0.0}, CVector::Ones(1), "exp");
}

IVProblem linear_problem_from_json(const nlohmann::json& j) {
  try {
    return make_linear(io::matrix_from_json(j.at("A")), io::complex_from_json(j.value("t0", nlohmann::json(0.0))),
                       io::vector_from_json(j.at("x0")));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("problem JSON: ") + e.what());
  }
}

nlohmann::json linear_problem_to_json(const IVProblem& problem) {
  if (!problem.matrix) throw DomainError("only linear problems have a JSON form");
  return {{"A", io::to_json(*problem.matrix)}, {"t0", io::to_json(problem.t0)}, {"x0", io::to_json(problem.x0)}};
}

IVProblem builtin_problem(const std::string& name) {
  if (name == "exp") return exponential_problem();
  if (name == "rotation") {
    CMatrix A(2, 2);
    A << 0.0, 1.0, -1.0, 0.0;
    CVector x0(2);
    x0 << 1.0, 0.0;
    return make_linear(A, {0.0, 0.0}, x0, "rotation");
  }
  if (name == "arenstorf") return arenstorf::problem();
  throw DomainError("unknown problem '" + name + "'");
}

namespace arenstorf {

namespace {

std::mutex cache_mutex;

// w^(3/2) on the principal branch.
Complex pow_three_halves(Complex w) { return w * std::sqrt(w); }

}  // namespace

CVector initial_state() {
  CVector x(4);
  x << 0.994, 0.0, 0.0, -2.001585106379080;
  return x;
}

CVector rhs(const CVector& state) {
  if (state.size() != 4) throw DimensionError("arenstorf::rhs expects a 4-vector");
  const Complex x1 = state[0];
  const Complex x2 = state[1];
  const Complex v1 = state[2];
  const Complex v2 = state[3];
  const Complex d_earth = pow_three_halves((x1 + kMu) * (x1 + kMu) + x2 * x2);
  const Complex d_moon = pow_three_halves((x1 - kMuHat) * (x1 - kMuHat) + x2 * x2);
  if (std::abs(d_earth) < kSingularityGuard) throw SingularityError("arenstorf: state too close to the earth", 0);
  if (std::abs(d_moon) < kSingularityGuard) throw SingularityError("arenstorf: state too close to the moon", 1);

  CVector out(4);
  out[0] = v1;
  out[1] = v2;
  out[2] = x1 + 2.0 * v2 - kMuHat * (x1 + kMu) / d_earth - kMu * (x1 - kMuHat) / d_moon;
  out[3] = x2 - 2.0 * v1 - kMuHat * x2 / d_earth - kMu * x2 / d_moon;
  return out;
}

double branch_proximity(const CVector& state) {
  const Complex x1 = state[0];
  const Complex x2 = state[1];
  double worst = 0.0;
  for (const Complex w : {(x1 + kMu) * (x1 + kMu) + x2 * x2, (x1 - kMuHat) * (x1 - kMuHat) + x2 * x2}) {
    if (w.imag() == 0.0) continue;
    worst = std::max(worst, std::abs(w.imag()) / std::abs(w.real()));
  }
  return worst;
}

IVProblem problem() {
  IVProblem p;
  p.name = "arenstorf";
  p.rhs = [](Complex, const CVector& x) { return rhs(x); };
  p.t0 = {0.0, 0.0};
  p.x0 = initial_state();
  return p;
}

GridFunction reference(int n_steps, const std::optional<std::filesystem::path>& cache_dir) {
  if (n_steps < kMinReferenceSteps) {
    throw DomainError("arenstorf::reference needs at least " + std::to_string(kMinReferenceSteps) + " steps");
  }
  TimeGrid grid = discretize(PathSpec::segment({0.0, 0.0}, {kPeriod, 0.0}), n_steps);
  const std::size_t count = static_cast<std::size_t>(n_steps) + 1;

  std::filesystem::path file;
  if (cache_dir) {
    file = *cache_dir / ("arenstorf_dopri5_" + std::to_string(n_steps) + ".bin");
    std::lock_guard lock(cache_mutex);
    std::ifstream in(file, std::ios::binary);
    if (in) {
      std::vector<double> raw(count * 8);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
      if (in.gcount() == static_cast<std::streamsize>(raw.size() * sizeof(double))) {
        std::vector<CVector> values(count, CVector(4));
        for (std::size_t j = 0; j < count; ++j) {
          for (int i = 0; i < 4; ++i) values[j][i] = {raw[j * 8 + 2 * i], raw[j * 8 + 2 * i + 1]};
        }
        return GridFunction{std::move(grid), std::move(values)};
      }
    }
  }

  GridFunction gf = integrate(tableaus::dopri5(), problem().rhs, grid, initial_state());

  if (cache_dir) {
    std::vector<double> raw(count * 8);
    for (std::size_t j = 0; j < count; ++j) {
      for (int i = 0; i < 4; ++i) {
        raw[j * 8 + 2 * i] = gf.values[j][i].real();
        raw[j * 8 + 2 * i + 1] = gf.values[j][i].imag();
      }
    }
    std::lock_guard lock(cache_mutex);
    std::filesystem::create_directories(*cache_dir);
    io::write_file_atomically(
        file, std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size() * sizeof(double)));
  }
  return gf;
}

double position_error(const CVector& state, const CVector& reference) {
  const double d1 = state[0].real() - reference[0].real();
  const double d2 = state[1].real() - reference[1].real();
  return std::hypot(d1, d2);
}

Variant parse_variant(const std::string& name) {
  if (name == "plain-euler") return Variant::PlainEuler;
  if (name == "composed-euler") return Variant::ComposedEuler;
  if (name == "reference") return Variant::Reference;
  throw DomainError("unknown Arenstorf variant '" + name + "' (plain-euler, composed-euler, reference)");
}

BenchmarkRun run(Variant variant, int n, int k, ImagPolicy policy,
                 const std::optional<std::filesystem::path>& cache_dir) {
  if (n < 1) throw DomainError("arenstorf::run: n must be positive");
  if (variant == Variant::Reference) {
    GridFunction ref = reference(n, cache_dir);
    std::vector<double> im(ref.values.size(), 0.0);
    return BenchmarkRun{std::move(ref), std::move(im), 0.0};
  }

  const IVProblem prob = problem();
  const double h = kPeriod / n;
  double worst = 0.0;
  const Rhs watched = [&worst](Complex, const CVector& x) {
    worst = std::max(worst, branch_proximity(x));
    return rhs(x);
  };
  const int depth = variant == Variant::ComposedEuler ? 1 : 0;
  const auto method = iterate_method(tableaus::euler(), variant == Variant::ComposedEuler ? k : 2, depth);
  MacroRun macro = integrate_macro(method, watched, {0.0, 0.0}, {h, 0.0}, n, prob.x0, policy);
  // The last macro node is pinned to the period.
  std::vector<Complex> nodes(macro.trajectory.grid.nodes().begin(), macro.trajectory.grid.nodes().end());
  nodes.back() = {kPeriod, 0.0};
  return BenchmarkRun{GridFunction{TimeGrid(std::move(nodes)), std::move(macro.trajectory.values)},
                      std::move(macro.im_norms), worst};
}

}  // namespace arenstorf

}  // namespace cxgrid
