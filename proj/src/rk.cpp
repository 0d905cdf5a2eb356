#include "cxgrid/rk.hpp"

#include <cmath>
#include <exception>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "cxgrid/errors.hpp"
#include "cxgrid/io.hpp"

namespace cxgrid {

namespace {

using boost::multiprecision::cpp_rational;

cpp_rational to_cpp(Rational r) { return cpp_rational(r.num, r.den); }

Complex to_complex(Rational r) { return {static_cast<double>(r.num) / static_cast<double>(r.den), 0.0}; }

// P_1 = 1, P_i = 1 + z sum_{j<i} A_ij P_j, P = 1 + z sum_i b_i P_i, carried out
// on coefficient lists.
template <class T, class AFn, class BFn>
std::vector<T> stability_recursion(int s, AFn a, BFn b) {
  std::vector<std::vector<T>> stage(static_cast<std::size_t>(s));
  auto accumulate_shifted = [](std::vector<T>& acc, const std::vector<T>& poly, const T& w) {
    if (acc.size() < poly.size() + 1) acc.resize(poly.size() + 1, T(0));
    for (std::size_t k = 0; k < poly.size(); ++k) acc[k + 1] += w * poly[k];
  };
  for (int i = 0; i < s; ++i) {
    std::vector<T> poly{T(1)};
    for (int j = 0; j < i; ++j) accumulate_shifted(poly, stage[static_cast<std::size_t>(j)], a(i, j));
    stage[static_cast<std::size_t>(i)] = std::move(poly);
  }
  std::vector<T> out(static_cast<std::size_t>(s) + 1, T(0));
  out[0] = T(1);
  for (int i = 0; i < s; ++i) accumulate_shifted(out, stage[static_cast<std::size_t>(i)], b(i));
  out.resize(static_cast<std::size_t>(s) + 1, T(0));
  return out;
}

bool is_real_vector(const CVector& v) {
  return (v.imag().array() == 0.0).all();
}

}  // namespace

ButcherTableau::ButcherTableau(std::string name, CMatrix A, CVector b, CVector c, int order, bool symmetric,
                               std::optional<ExactCoefficients> exact)
    : name_(std::move(name)),
      A_(std::move(A)),
      b_(std::move(b)),
      c_(std::move(c)),
      order_(order),
      symmetric_(symmetric),
      exact_(std::move(exact)) {
  const auto s = b_.size();
  if (s == 0) throw DimensionError("tableau needs at least one stage");
  if (A_.rows() != s || A_.cols() != s || c_.size() != s) {
    throw DimensionError("tableau " + name_ + ": A must be s x s and c of length s");
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      if (A_(i, j) != Complex{0.0, 0.0}) {
        throw DomainError("tableau " + name_ + ": A must be strictly lower triangular (explicit)");
      }
    }
  }
  if (!all_finite(A_) || !all_finite(b_) || !all_finite(c_)) {
    throw DomainError("tableau " + name_ + ": non-finite coefficient");
  }
  if (order_ < 1 || order_ > s) {
    throw DomainError("tableau " + name_ + ": declared order must lie in [1, s]");
  }
  if (exact_ && (exact_->b.size() != static_cast<std::size_t>(s) ||
                 exact_->A.size() != static_cast<std::size_t>(s))) {
    throw DimensionError("tableau " + name_ + ": exact coefficients have the wrong shape");
  }
}

ButcherTableau ButcherTableau::from_rationals(std::string name, const std::vector<std::vector<Rational>>& A,
                                              const std::vector<Rational>& b, const std::vector<Rational>& c,
                                              int order) {
  const auto s = static_cast<Eigen::Index>(b.size());
  CMatrix Am = CMatrix::Zero(s, s);
  ExactCoefficients exact;
  exact.A.assign(b.size(), std::vector<Rational>(b.size(), Rational{0, 1}));
  if (static_cast<Eigen::Index>(A.size()) != s) throw DimensionError("from_rationals: A needs s rows");
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto& row = A[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) > s) throw DimensionError("from_rationals: row too long");
    for (std::size_t j = 0; j < row.size(); ++j) {
      Am(i, static_cast<Eigen::Index>(j)) = to_complex(row[j]);
      exact.A[static_cast<std::size_t>(i)][j] = row[j];
    }
  }
  CVector bv(s), cv(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    bv[i] = to_complex(b[static_cast<std::size_t>(i)]);
    cv[i] = to_complex(c.at(static_cast<std::size_t>(i)));
  }
  exact.b = b;
  return ButcherTableau(std::move(name), std::move(Am), std::move(bv), std::move(cv), order, false,
                        std::move(exact));
}

bool ButcherTableau::is_real() const {
  return (A_.imag().array() == 0.0).all() && is_real_vector(b_) && is_real_vector(c_);
}

namespace tableaus {

ButcherTableau euler() { return ButcherTableau::from_rationals("euler", {{}}, {{1, 1}}, {{0, 1}}, 1); }

ButcherTableau heun() {
  return ButcherTableau::from_rationals("heun", {{}, {{1, 1}}}, {{1, 2}, {1, 2}}, {{0, 1}, {1, 1}}, 2);
}

ButcherTableau rk4() {
  return ButcherTableau::from_rationals("rk4", {{}, {{1, 2}}, {{0, 1}, {1, 2}}, {{0, 1}, {0, 1}, {1, 1}}},
                                        {{1, 6}, {1, 3}, {1, 3}, {1, 6}},
                                        {{0, 1}, {1, 2}, {1, 2}, {1, 1}}, 4);
}

ButcherTableau dopri5() {
  return ButcherTableau::from_rationals(
      "dopri5",
      {{},
       {{1, 5}},
       {{3, 40}, {9, 40}},
       {{44, 45}, {-56, 15}, {32, 9}},
       {{19372, 6561}, {-25360, 2187}, {64448, 6561}, {-212, 729}},
       {{9017, 3168}, {-355, 33}, {46732, 5247}, {49, 176}, {-5103, 18656}},
       {{35, 384}, {0, 1}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}}},
      {{35, 384}, {0, 1}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}, {0, 1}},
      {{0, 1}, {1, 5}, {3, 10}, {4, 5}, {8, 9}, {1, 1}, {1, 1}}, 5);
}

}  // namespace tableaus

ButcherTableau builtin_tableau(const std::string& name) {
  if (name == "euler") return tableaus::euler();
  if (name == "heun") return tableaus::heun();
  if (name == "rk4") return tableaus::rk4();
  if (name == "dopri5") return tableaus::dopri5();
  throw DomainError("unknown method '" + name + "'");
}

std::vector<std::string> builtin_tableau_names() { return {"euler", "heun", "rk4", "dopri5"}; }

nlohmann::json tableau_to_json(const ButcherTableau& tab) {
  const auto s = tab.stages();
  auto A = nlohmann::json::array();
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) A.push_back(io::to_json(tab.A()(i, j)));
  }
  return {{"s", s},
          {"A", std::move(A)},
          {"b", io::to_json(tab.b())},
          {"c", io::to_json(tab.c())},
          {"order", tab.order()},
          {"symmetric", tab.symmetric()}};
}

ButcherTableau tableau_from_json(const nlohmann::json& j, std::string name) {
  try {
    const int s = j.at("s").get<int>();
    if (s < 1) throw DimensionError("tableau JSON: s must be >= 1");
    const auto& jA = j.at("A");
    CMatrix A(s, s);
    const auto count = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
    // For s == 1 a flat list holds one number or one [re, im] pair; a nested
    // list holds one row with one entry.
    const bool flat = jA.is_array() && jA.size() == count &&
                      (s > 1 || jA[0].is_number() || (jA[0].is_array() && jA[0].size() == 2));
    if (flat) {
      for (int i = 0; i < s; ++i) {
        for (int c = 0; c < s; ++c) A(i, c) = io::complex_from_json(jA[static_cast<std::size_t>(i * s + c)]);
      }
    } else {
      A = io::matrix_from_json(jA);
      if (A.rows() != s || A.cols() != s) throw DimensionError("tableau JSON: A must be s x s");
    }
    CVector b = io::vector_from_json(j.at("b"));
    CVector c = io::vector_from_json(j.at("c"));
    return ButcherTableau(std::move(name), std::move(A), std::move(b), std::move(c), j.at("order").get<int>(),
                          j.value("symmetric", false));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("tableau JSON: ") + e.what());
  }
}

CVector rk_step(const ButcherTableau& tab, const Rhs& f, Complex t, Complex tau, const CVector& x) {
  const int s = tab.stages();
  const auto& A = tab.A();
  const auto& b = tab.b();
  const auto& c = tab.c();
  std::vector<CVector> k(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    CVector stage = x;
    for (int j = 0; j < i; ++j) {
      if (A(i, j) != Complex{0.0, 0.0}) stage += (tau * A(i, j)) * k[static_cast<std::size_t>(j)];
    }
    k[static_cast<std::size_t>(i)] = f(t + c[i] * tau, stage);
    if (k[static_cast<std::size_t>(i)].size() != x.size()) {
      throw DimensionError("rk_step: right-hand side returned a vector of the wrong dimension");
    }
  }
  CVector incr = CVector::Zero(x.size());
  for (int i = 0; i < s; ++i) {
    if (b[i] != Complex{0.0, 0.0}) incr += b[i] * k[static_cast<std::size_t>(i)];
  }
  return x + tau * incr;
}

GridFunction integrate(const ButcherTableau& tab, const Rhs& f, const TimeGrid& grid, const CVector& x0) {
  std::vector<CVector> values;
  values.reserve(grid.nodes().size());
  values.push_back(x0);
  const auto nodes = grid.nodes();
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    try {
      values.push_back(rk_step(tab, f, nodes[j], nodes[j + 1] - nodes[j], values.back()));
    } catch (const std::exception& e) {
      std::throw_with_nested(StepError("step " + std::to_string(j) + " failed: " + e.what(), j));
    }
  }
  return GridFunction{grid, std::move(values)};
}

std::vector<Complex> stability_polynomial(const ButcherTableau& tab) {
  const int s = tab.stages();
  if (const auto& exact = tab.exact()) {
    const auto coeffs = stability_recursion<cpp_rational>(
        s, [&](int i, int j) { return to_cpp(exact->A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]); },
        [&](int i) { return to_cpp(exact->b[static_cast<std::size_t>(i)]); });
    std::vector<Complex> out;
    out.reserve(coeffs.size());
    for (const auto& q : coeffs) out.emplace_back(q.convert_to<double>(), 0.0);
    return out;
  }
  return stability_recursion<Complex>(
      s, [&](int i, int j) { return tab.A()(i, j); }, [&](int i) { return tab.b()[i]; });
}

CMatrix linear_step_matrix(const ButcherTableau& tab, const CMatrix& A, Complex tau) {
  const auto coeffs = stability_polynomial(tab);
  return mat_poly_eval(coeffs, tau * A);
}

}  // namespace cxgrid
