#include "cxgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "cxgrid/errors.hpp"
#include "cxgrid/io.hpp"

namespace cxgrid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_path_order(int p) {
  if (p < 1) throw DomainError("path order p must be >= 1, got " + std::to_string(p));
}

// zeta_m(j) = exp(2 pi i j / m), reduced modulo m first to keep the angle small.
Complex root_of_unity(long m, long j) {
  long r = j % m;
  if (r < 0) r += m;
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(m));
}

// Reflection across the line through t0 and t.
Complex mirror_across_chord(Complex z, Complex t0, Complex t) {
  const Complex chord = t - t0;
  return t0 + chord * std::conj((z - t0) / chord);
}

}  // namespace

TimeGrid::TimeGrid(std::vector<Complex> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("time grid needs at least two nodes");
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (!finite(nodes_[j])) throw DomainError("time grid node " + std::to_string(j) + " is not finite");
    if (j > 0 && nodes_[j] == nodes_[j - 1]) {
      throw DomainError("time grid has a zero step at index " + std::to_string(j - 1));
    }
  }
}

TimeGrid TimeGrid::from_steps(Complex t0, std::span<const Complex> steps) {
  std::vector<Complex> nodes;
  nodes.reserve(steps.size() + 1);
  nodes.push_back(t0);
  Complex t = t0;
  for (const Complex tau : steps) {
    t += tau;
    nodes.push_back(t);
  }
  return TimeGrid(std::move(nodes));
}

std::vector<Complex> TimeGrid::steps() const {
  std::vector<Complex> out(step_count());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = nodes_[j + 1] - nodes_[j];
  return out;
}

double TimeGrid::max_step() const {
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) m = std::max(m, std::abs(nodes_[j + 1] - nodes_[j]));
  return m;
}

TimeGrid TimeGrid::conjugate() const {
  std::vector<Complex> c(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), c.begin(), [](Complex z) { return std::conj(z); });
  return TimeGrid(std::move(c));
}

PathSpec PathSpec::segment(Complex t0, Complex t) {
  PathSpec s;
  s.kind = PathKind::RealSegment;
  s.t0 = t0;
  s.t = t;
  return s;
}

PathSpec PathSpec::circle(Complex t0, Complex t, int p, bool conjugated) {
  PathSpec s;
  s.kind = PathKind::CircleSegment;
  s.t0 = t0;
  s.t = t;
  s.p = p;
  s.conjugated = conjugated;
  return s;
}

PathSpec PathSpec::explicit_nodes(std::vector<Complex> nodes) {
  PathSpec s;
  s.kind = PathKind::NodeList;
  if (!nodes.empty()) {
    s.t0 = nodes.front();
    s.t = nodes.back();
  }
  s.nodes = std::move(nodes);
  return s;
}

Complex gamma_segment(Complex t0, Complex t, int p, double x) {
  require_path_order(p);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("gamma_segment: parameter outside [0, 1]");
  if (t == t0) throw DomainError("gamma_segment: degenerate path with t == t0");
  const double angle = kPi / (p + 1);
  const Complex scale = (t0 - t) / (2.0 * kI * std::sin(angle));
  const Complex arc = std::exp(kI * (kPi * (1.0 - 2.0 * x) / (p + 1)));
  return scale * (arc - std::cos(angle)) + (t0 + t) / 2.0;
}

TimeGrid discretize(const PathSpec& path, int n) {
  if (path.kind == PathKind::NodeList) return TimeGrid(path.nodes);
  if (n < 1) throw DomainError("discretize: n must be >= 1");
  if (path.t == path.t0) throw DomainError("discretize: degenerate path with t == t0");

  std::vector<Complex> nodes(static_cast<std::size_t>(n) + 1);
  nodes.front() = path.t0;
  nodes.back() = path.t;
  for (int j = 1; j < n; ++j) {
    const double x = static_cast<double>(j) / n;
    Complex z;
    if (path.kind == PathKind::RealSegment) {
      z = path.t0 + (path.t - path.t0) * x;
    } else {
      z = gamma_segment(path.t0, path.t, path.p, x);
      if (path.conjugated) z = mirror_across_chord(z, path.t0, path.t);
    }
    nodes[static_cast<std::size_t>(j)] = z;
  }
  return TimeGrid(std::move(nodes));
}

std::vector<Complex> normalized_circle_steps(int p, int k) {
  if (k < 2) throw DomainError("normalized_circle_steps: k must be >= 2");
  return discretize(PathSpec::circle({0.0, 0.0}, {1.0, 0.0}, p), k).steps();
}

TimeGrid roots_of_unity_steps(Complex t0, Complex t, int p, int n, int k) {
  require_path_order(p);
  if (n < 2) throw DomainError("roots_of_unity_steps: n must be >= 2");
  if (t == t0) throw DomainError("roots_of_unity_steps: degenerate path with t == t0");
  const long m = static_cast<long>(n) * (p + 1);

  Complex denominator{0.0, 0.0};
  for (long j = k; j < k + n; ++j) denominator += root_of_unity(m, j);
  // n consecutive roots cover less than a full turn, so their sum cannot vanish.
  if (std::abs(denominator) < 1e-12) throw DomainError("roots_of_unity_steps: vanishing phase sum");
  const Complex alpha = (t - t0) / denominator;

  std::vector<Complex> steps(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) steps[static_cast<std::size_t>(j)] = alpha * root_of_unity(m, k + j);
  std::vector<Complex> nodes(steps.size() + 1);
  nodes.front() = t0;
  for (std::size_t j = 0; j < steps.size(); ++j) nodes[j + 1] = nodes[j] + steps[j];
  nodes.back() = t;
  return TimeGrid(std::move(nodes));
}

std::optional<std::vector<std::size_t>> symmetric_witness(const TimeGrid& grid, double tol) {
  const std::vector<Complex> tau = grid.steps();
  const std::size_t n = tau.size();
  auto pairs = [&](std::size_t i, std::size_t j) { return std::abs(tau[i] - std::conj(tau[j])) <= tol; };
  auto valid = [&](const std::vector<std::size_t>& pi) {
    for (std::size_t j = 0; j < n; ++j) {
      if (pi[pi[j]] != j || !pairs(j, pi[j])) return false;
    }
    return true;
  };

  std::vector<std::size_t> pi(n);
  for (std::size_t j = 0; j < n; ++j) pi[j] = j;
  if (valid(pi)) return pi;
  for (std::size_t j = 0; j < n; ++j) pi[j] = n - 1 - j;
  if (valid(pi)) return pi;

  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  std::fill(pi.begin(), pi.end(), kUnassigned);

  if (n <= 12) {
    // Exhaustive: the smallest open index is either a fixed point or paired
    // with a later open index.
    std::function<bool(std::size_t)> search = [&](std::size_t from) -> bool {
      std::size_t i = from;
      while (i < n && pi[i] != kUnassigned) ++i;
      if (i == n) return true;
      if (pairs(i, i)) {
        pi[i] = i;
        if (search(i + 1)) return true;
        pi[i] = kUnassigned;
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        if (pi[j] != kUnassigned || !pairs(i, j)) continue;
        pi[i] = j;
        pi[j] = i;
        if (search(i + 1)) return true;
        pi[i] = pi[j] = kUnassigned;
      }
      return false;
    };
    if (search(0)) return pi;
    return std::nullopt;
  }

  // Greedy conjugate matching for long grids.
  for (std::size_t i = 0; i < n; ++i) {
    if (pi[i] != kUnassigned) continue;
    if (pairs(i, i)) {
      pi[i] = i;
      continue;
    }
    std::size_t best = kUnassigned;
    double best_dist = tol;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pi[j] != kUnassigned) continue;
      const double dist = std::abs(tau[i] - std::conj(tau[j]));
      if (dist <= best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == kUnassigned) return std::nullopt;
    pi[i] = best;
    pi[best] = i;
  }
  return pi;
}

TimeGrid fractal_grid(int p, int g, int k, int r, Complex t0, Complex h) {
  require_path_order(p);
  if (g < 1) throw DomainError("fractal_grid: gain g must be >= 1");
  if (k < 2) throw DomainError("fractal_grid: k must be >= 2");
  if (r < 0) throw DomainError("fractal_grid: depth r must be >= 0");
  if (h == Complex{0.0, 0.0} || !finite(h)) throw DomainError("fractal_grid: step h must be finite and nonzero");
  if (r * std::log2(static_cast<double>(k)) > 26.0) throw DomainError("fractal_grid: more than 2^26 steps requested");

  // Level l splits with the schedule of order p + (l - 1) g.
  std::vector<std::vector<Complex>> schedules(static_cast<std::size_t>(r) + 1);
  for (int level = 1; level <= r; ++level) {
    schedules[static_cast<std::size_t>(level)] = normalized_circle_steps(p + (level - 1) * g, k);
  }

  std::vector<Complex> steps;
  steps.reserve(static_cast<std::size_t>(std::pow(k, r)));
  std::function<void(int, Complex)> expand = [&](int level, Complex step) {
    if (level == 0) {
      steps.push_back(step);
      return;
    }
    for (const Complex sigma : schedules[static_cast<std::size_t>(level)]) expand(level - 1, sigma * step);
  };
  expand(r, h);
  return TimeGrid::from_steps(t0, steps);
}

void write_grid_csv(std::ostream& out, const TimeGrid& grid) {
  out << "index,re_t,im_t,re_tau,im_tau\n";
  const auto nodes = grid.nodes();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out << j << ',' << io::format_double(nodes[j].real()) << ',' << io::format_double(nodes[j].imag()) << ',';
    if (j + 1 < nodes.size()) {
      const Complex tau = nodes[j + 1] - nodes[j];
      out << io::format_double(tau.real()) << ',' << io::format_double(tau.imag());
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace cxgrid
