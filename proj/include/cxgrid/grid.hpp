#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "cxgrid/numerics.hpp"

namespace cxgrid {

/// Ordered complex time nodes t_0..t_n with nonzero steps t_{j+1} - t_j.
class TimeGrid {
 public:
  /// Throws DomainError for fewer than two nodes, repeated consecutive nodes or
  /// non-finite entries.
  explicit TimeGrid(std::vector<Complex> nodes);

  /// Grid t0, t0 + steps[0], t0 + steps[0] + steps[1], ...
  static TimeGrid from_steps(Complex t0, std::span<const Complex> steps);

  std::span<const Complex> nodes() const noexcept { return nodes_; }
  Complex node(std::size_t j) const { return nodes_.at(j); }
  Complex start() const noexcept { return nodes_.front(); }
  Complex end() const noexcept { return nodes_.back(); }

  std::size_t step_count() const noexcept { return nodes_.size() - 1; }
  Complex step(std::size_t j) const { return nodes_.at(j + 1) - nodes_.at(j); }
  std::vector<Complex> steps() const;

  /// Largest step modulus.
  double max_step() const;

  /// Elementwise complex conjugate of the nodes.
  TimeGrid conjugate() const;

 private:
  std::vector<Complex> nodes_;
};

enum class PathKind { RealSegment, CircleSegment, NodeList };

/// Description of a path from t0 to t that can be discretized equidistantly in
/// its parameter.
struct PathSpec {
  PathKind kind = PathKind::RealSegment;
  Complex t0{0.0, 0.0};
  Complex t{1.0, 0.0};
  /// Order the circle segment is tuned for; the arc is a (p+1)-th of a circle.
  int p = 1;
  /// Mirror the circle segment across the chord from t0 to t. For real endpoints
  /// this is the complex conjugate path.
  bool conjugated = false;
  /// Explicit nodes, only for PathKind::NodeList.
  std::vector<Complex> nodes;

  static PathSpec segment(Complex t0, Complex t);
  static PathSpec circle(Complex t0, Complex t, int p, bool conjugated = false);
  static PathSpec explicit_nodes(std::vector<Complex> nodes);
};

/// Point x in [0, 1] of the (p+1)-th circle segment joining t0 and t.
Complex gamma_segment(Complex t0, Complex t, int p, double x);

/// n + 1 nodes at equal parameter spacing along the path. For a node list path
/// n is ignored and the nodes are returned as given.
TimeGrid discretize(const PathSpec& path, int n);

/// Steps of discretize(circle(0, 1, p), k): the normalized micro steps whose sum
/// is 1 and whose (p+1)-th powers sum to 0.
std::vector<Complex> normalized_circle_steps(int p, int k);

/// n steps pointing along consecutive n(p+1)-th roots of unity zeta(k..k+n-1),
/// scaled by one common factor so that they sum to t - t0.
TimeGrid roots_of_unity_steps(Complex t0, Complex t, int p, int n, int k);

/// Involution pi on the step indices 0..n-1 with step(j) == conj(step(pi[j]))
/// within tol, or nullopt if no such pairing exists.
std::optional<std::vector<std::size_t>> symmetric_witness(const TimeGrid& grid, double tol = 1e-12);

/// Flattened micro grid of the r-fold iterated composition: level r splits the
/// step h into the k steps of normalized_circle_steps(p + (r-1) g, k), each of
/// which is expanded by level r - 1. Has k^r steps.
TimeGrid fractal_grid(int p, int g, int k, int r, Complex t0, Complex h);

/// CSV dump with columns index,re_t,im_t,re_tau,im_tau; the last row has empty
/// step columns.
void write_grid_csv(std::ostream& out, const TimeGrid& grid);

}  // namespace cxgrid
