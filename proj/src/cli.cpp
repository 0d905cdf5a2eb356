#include "cxgrid/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cxgrid/analysis.hpp"
#include "cxgrid/composition.hpp"
#include "cxgrid/errors.hpp"
#include "cxgrid/grid.hpp"
#include "cxgrid/io.hpp"
#include "cxgrid/problems.hpp"
#include "cxgrid/rk.hpp"

namespace cxgrid::cli {

namespace {

struct RunConfig {
  std::string method = "euler";
  std::string problem = "exp";
  std::string path = "real";
  std::string variant = "composed-euler";
  std::string t0;
  std::string t1;
  int p = 1;
  int k = 2;
  int r = 1;
  int g = 0;
  int n = 10;
  int dim = 2;
  int ref_n = 100000;
  std::string n_list;
  bool conjugate = false;
  bool keep_complex = false;
  std::string out;
  std::string cache_dir;
  unsigned long long seed = 0;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char sep = 0;
  if (!(in >> re)) throw UsageError("cannot parse complex value '" + text + "' (expected re or re,im)");
  if (in >> sep) {
    if (sep != ',' || !(in >> im)) throw UsageError("cannot parse complex value '" + text + "'");
  }
  return {re, im};
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("bad entry '" + item + "' in --n-list");
    }
  }
  if (out.empty()) throw UsageError("--n-list is empty");
  return out;
}

bool is_json_file(const std::string& s) {
  return s.size() > 5 && s.ends_with(".json") && std::filesystem::exists(s);
}

ButcherTableau load_method(const RunConfig& cfg) {
  if (is_json_file(cfg.method)) {
    return tableau_from_json(nlohmann::json::parse(io::read_file(cfg.method)), cfg.method);
  }
  return builtin_tableau(cfg.method);
}

IVProblem load_problem(const RunConfig& cfg) {
  if (is_json_file(cfg.problem)) return linear_problem_from_json(nlohmann::json::parse(io::read_file(cfg.problem)));
  if (cfg.problem == "random") {
    if (cfg.dim < 1) throw UsageError("--dim must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    CMatrix A(cfg.dim, cfg.dim);
    CVector x0(cfg.dim);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = unit(rng);
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = unit(rng);
    return make_linear(A, {0.0, 0.0}, x0, "random");
  }
  return builtin_problem(cfg.problem);
}

std::pair<Complex, Complex> endpoints(const RunConfig& cfg, Complex default_t0) {
  const Complex t0 = cfg.t0.empty() ? default_t0 : parse_complex(cfg.t0);
  const Complex t1 = cfg.t1.empty() ? t0 + 1.0 : parse_complex(cfg.t1);
  return {t0, t1};
}

// Grid family for the given path kind; "fractal" means n macro steps of the
// r-fold iterated composition.
GridFamily make_family(const RunConfig& cfg, Complex t0, Complex t1, const ButcherTableau* tab) {
  if (cfg.path == "real") {
    return [=](int n) { return discretize(PathSpec::segment(t0, t1), n); };
  }
  if (cfg.path == "circle") {
    const int p = cfg.p;
    const bool conj = cfg.conjugate;
    return [=](int n) { return discretize(PathSpec::circle(t0, t1, p, conj), n); };
  }
  if (cfg.path == "roots") {
    const int p = cfg.p;
    const int k = cfg.k;
    return [=](int n) { return roots_of_unity_steps(t0, t1, p, n, k); };
  }
  if (cfg.path == "fractal") {
    if (tab) {
      const auto method = iterate_method(*tab, cfg.k, cfg.r, cfg.g > 0 ? std::optional<int>(cfg.g) : std::nullopt);
      return [=](int n) { return method.macro_grid(t0, (t1 - t0) / static_cast<double>(n), n); };
    }
    const int p = cfg.p, g = std::max(cfg.g, 1), k = cfg.k, r = cfg.r;
    return [=](int n) {
      if (n != 1) throw UsageError("a fractal grid without --method describes a single macro step (--n 1)");
      return fractal_grid(p, g, k, r, t0, t1 - t0);
    };
  }
  throw UsageError("unknown path kind '" + cfg.path + "' (expected real, circle, roots or fractal)");
}

void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
  if (cfg.out.empty()) {
    out << body;
  } else {
    io::write_file_atomically(cfg.out, body);
  }
}

void write_trajectory_header(std::ostream& os, int dim) {
  os << "index,re_t,im_t";
  for (int i = 0; i < dim; ++i) os << ",re_x" << i << ",im_x" << i;
  os << '\n';
}

void write_trajectory_row(std::ostream& os, std::size_t index, Complex t, const CVector& x) {
  os << index << ',' << io::format_double(t.real()) << ',' << io::format_double(t.imag());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    os << ',' << io::format_double(x[i].real()) << ',' << io::format_double(x[i].imag());
  }
  os << '\n';
}

int cmd_grid(const RunConfig& cfg, std::ostream& out) {
  const auto [t0, t1] = endpoints(cfg, {0.0, 0.0});
  const int n = cfg.path == "fractal" ? 1 : cfg.n;
  const TimeGrid grid = make_family(cfg, t0, t1, nullptr)(n);
  std::ostringstream body;
  write_grid_csv(body, grid);
  emit(cfg, body.str(), out);
  return kExitOk;
}

int cmd_integrate(const RunConfig& cfg, std::ostream& out) {
  const ButcherTableau tab = load_method(cfg);
  const IVProblem problem = load_problem(cfg);
  const auto [t0, t1] = endpoints(cfg, problem.t0);
  const TimeGrid grid = make_family(cfg, t0, t1, &tab)(cfg.n);
  const GridFunction gf = integrate(tab, problem.rhs, grid, problem.x0);

  std::ostringstream body;
  write_trajectory_header(body, problem.dimension());
  const auto nodes = gf.grid.nodes();
  for (std::size_t j = 0; j < nodes.size(); ++j) write_trajectory_row(body, j, nodes[j], gf.values[j]);
  const auto reality = reality_report(gf);
  if (problem.exact_flow) body << "# terminal_error=" << io::format_double(terminal_error(gf, problem)) << '\n';
  body << "# terminal_im_norm=" << io::format_double(reality.terminal_im_norm)
       << " max_node_im_norm=" << io::format_double(reality.max_node_im_norm) << '\n';
  emit(cfg, body.str(), out);
  return kExitOk;
}

int cmd_order_study(const RunConfig& cfg, std::ostream& out) {
  const std::vector<int> n_values = parse_n_list(cfg.n_list);
  const ButcherTableau tab = load_method(cfg);
  const IVProblem problem = load_problem(cfg);
  const auto [t0, t1] = endpoints(cfg, problem.t0);
  if (t0 != problem.t0) throw UsageError("order-study paths must start at the problem's t0");
  const ConvergenceStudy study = estimate_order(tab, problem, make_family(cfg, t0, t1, &tab), n_values);
  std::ostringstream body;
  write_study_csv(body, study);
  emit(cfg, body.str(), out);
  return kExitOk;
}

int cmd_schedule(const RunConfig& cfg, std::ostream& out) {
  const auto sched = schedule_from_path(cfg.p, cfg.k, std::max(cfg.g, 1));
  emit(cfg, schedule_to_json(sched).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_arenstorf(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  using namespace arenstorf;
  std::optional<std::filesystem::path> cache;
  if (!cfg.cache_dir.empty()) cache = cfg.cache_dir;
  const Variant variant = parse_variant(cfg.variant);
  const ImagPolicy policy = cfg.keep_complex ? ImagPolicy::Keep : ImagPolicy::ProjectReal;
  const BenchmarkRun result = arenstorf::run(variant, cfg.n, cfg.k, policy, cache);

  // The reference is compared against its own starting point (orbit closure).
  const CVector target = variant == Variant::Reference ? initial_state() : reference(cfg.ref_n, cache).terminal();
  const CVector& terminal = result.trajectory.terminal();
  const double pos_error = position_error(terminal, target);
  const double state_error = (terminal.real() - target.real()).norm();

  std::ostringstream body;
  body << "index,t,x1,x2,v1,v2,im_norm\n";
  const auto& values = result.trajectory.values;
  for (std::size_t m = 0; m < values.size(); ++m) {
    body << m << ',' << io::format_double(result.trajectory.grid.node(m).real());
    for (int i = 0; i < 4; ++i) body << ',' << io::format_double(values[m][i].real());
    body << ',' << io::format_double(result.im_norms[m]) << '\n';
  }
  const double max_im = *std::max_element(result.im_norms.begin(), result.im_norms.end());

  std::ostringstream summary;
  summary << "# variant=" << cfg.variant << " n=" << cfg.n << " position_error=" << io::format_double(pos_error)
          << " state_error=" << io::format_double(state_error)
          << (variant == Variant::Reference ? " against=initial_state"
                                            : " against=reference_n" + std::to_string(cfg.ref_n))
          << " max_im_norm=" << io::format_double(max_im)
          << " max_branch_proximity=" << io::format_double(result.max_branch_proximity) << '\n';
  body << summary.str();
  emit(cfg, body.str(), out);
  if (!cfg.out.empty()) out << summary.str();
  err << summary.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Runge-Kutta integration along complex time grids"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    sub->add_option("--seed", cfg.seed, "Seed for randomized problems");
  };
  auto add_path = [&](CLI::App* sub) {
    sub->add_option("--path", cfg.path, "real | circle | roots | fractal");
    sub->add_option("--p", cfg.p, "Order the circle segment is tuned for");
    sub->add_option("--k", cfg.k, "Micro steps per level (fractal) or root phase (roots)");
    sub->add_option("--r", cfg.r, "Iteration depth (fractal)");
    sub->add_option("--g", cfg.g, "Order gain per level (fractal)");
    sub->add_option("--t0", cfg.t0, "Start time as re or re,im");
    sub->add_option("--t1", cfg.t1, "End time as re or re,im (default t0 + 1)");
    sub->add_flag("--conjugate", cfg.conjugate, "Mirror the circle segment");
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.method, "euler | heun | rk4 | dopri5 | tableau .json");
    sub->add_option("--problem", cfg.problem, "exp | rotation | arenstorf | random | problem .json");
    sub->add_option("--dim", cfg.dim, "Dimension of the random problem");
  };

  auto* grid = app.add_subcommand("grid", "Dump a time grid as CSV");
  add_common(grid);
  add_path(grid);
  grid->add_option("--n", cfg.n, "Number of steps");

  auto* integ = app.add_subcommand("integrate", "Integrate a problem along a grid");
  add_common(integ);
  add_path(integ);
  add_method(integ);
  integ->add_option("--n", cfg.n, "Number of steps (macro steps for fractal)");

  auto* study = app.add_subcommand("order-study", "Fit the terminal convergence order");
  add_common(study);
  add_path(study);
  add_method(study);
  study->add_option("--n-list", cfg.n_list, "Comma separated step counts")->required();

  auto* sched = app.add_subcommand("schedule", "Export a composition schedule as JSON");
  add_common(sched);
  sched->add_option("--p", cfg.p, "Base order");
  sched->add_option("--k", cfg.k, "Number of coefficients");
  sched->add_option("--g", cfg.g, "Order gain");

  auto* aren = app.add_subcommand("arenstorf", "Arenstorf orbit benchmark");
  add_common(aren);
  aren->add_option("--variant", cfg.variant, "plain-euler | composed-euler | reference");
  aren->add_option("--n", cfg.n, "Steps (macro steps for composed-euler)");
  aren->add_option("--k", cfg.k, "Micro steps per macro step");
  aren->add_option("--ref-n", cfg.ref_n, "Steps of the reference orbit");
  aren->add_option("--cache-dir", cfg.cache_dir, "Directory caching reference orbits");
  aren->add_flag("--keep-complex", cfg.keep_complex, "Keep the state complex between macro steps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (grid->parsed()) return cmd_grid(cfg, out);
    if (integ->parsed()) return cmd_integrate(cfg, out);
    if (study->parsed()) return cmd_order_study(cfg, out);
    if (sched->parsed()) return cmd_schedule(cfg, out);
    return cmd_arenstorf(cfg, out, err);
  } catch (const StepError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SingularityError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IndeterminateOrderError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cxgrid::cli
