#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "cxgrid/composition.hpp"
#include "cxgrid/rk.hpp"

namespace cxgrid {

using Flow = std::function<CVector(Complex t0, Complex t, const CVector& x0)>;

/// Initial value problem x' = f(t, x), x(t0) = x0.
struct IVProblem {
  std::string name;
  Rhs rhs;
  Complex t0{0.0, 0.0};
  CVector x0;
  /// Coefficient matrix for x' = A x; absent for general right-hand sides.
  std::optional<CMatrix> matrix;
  /// Exact flow, present for linear problems.
  Flow exact_flow;

  int dimension() const noexcept { return static_cast<int>(x0.size()); }
  bool is_linear() const noexcept { return matrix.has_value(); }
};

IVProblem make_linear(const CMatrix& A, Complex t0, const CVector& x0, std::string name = "linear");

/// x' = x, x(0) = 1.
IVProblem exponential_problem();

/// { A, t0, x0 } with complex entries as [re, im].
IVProblem linear_problem_from_json(const nlohmann::json& j);
nlohmann::json linear_problem_to_json(const IVProblem& problem);

/// "exp", "rotation" or "arenstorf".
IVProblem builtin_problem(const std::string& name);

namespace arenstorf {

inline constexpr double kMu = 0.012277471;
inline constexpr double kMuHat = 1.0 - kMu;
inline constexpr double kPeriod = 17.065216560157960;
inline constexpr double kSingularityGuard = 1e-9;
inline constexpr int kMinReferenceSteps = 10000;

/// (x1, x2, x1', x2') at t = 0.
CVector initial_state();

/// Planar restricted three-body right-hand side. Complex states use the
/// principal branch of w^(3/2). Throws SingularityError (body 0 earth, 1 moon)
/// when |w^(3/2)| < kSingularityGuard.
CVector rhs(const CVector& state);

/// max over both bodies of |Im w| / |Re w| for the radicands w; 0 on real states.
double branch_proximity(const CVector& state);

IVProblem problem();

/// Fixed-step Dormand-Prince trajectory on an equidistant real grid over one
/// period. With a cache directory the result is stored there keyed by n_steps
/// and reused on later calls.
GridFunction reference(int n_steps, const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

/// Euclidean distance between the real parts of the positions (x1, x2).
double position_error(const CVector& state, const CVector& reference);

enum class Variant { PlainEuler, ComposedEuler, Reference };

/// Parses "plain-euler", "composed-euler" or "reference".
Variant parse_variant(const std::string& name);

struct BenchmarkRun {
  /// Values on the macro nodes of [0, kPeriod].
  GridFunction trajectory;
  /// Imaginary-part norm per macro node before projection.
  std::vector<double> im_norms;
  /// Largest branch_proximity seen on any micro node.
  double max_branch_proximity = 0.0;
};

/// Orbit over one period with n steps (macro steps with k micro steps each for
/// the composed variant).
BenchmarkRun run(Variant variant, int n, int k = 2, ImagPolicy policy = ImagPolicy::ProjectReal,
                 const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace arenstorf

}  // namespace cxgrid
