#include "cxgrid/numerics.hpp"

#include <cmath>

#include "cxgrid/errors.hpp"

namespace cxgrid {

namespace {

void require_square(const CMatrix& M, const char* op) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionError(std::string(op) + ": matrix must be square and non-empty");
  }
}

double one_norm(const CMatrix& M) {
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

bool all_finite(const CMatrix& M) {
  for (Eigen::Index i = 0; i < M.size(); ++i) {
    const Complex z = M.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

bool all_finite(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

double imag_norm(const CVector& v) { return v.imag().norm(); }

CMatrix mat_poly_eval(std::span<const Complex> coeffs, const CMatrix& M) {
  require_square(M, "mat_poly_eval");
  if (coeffs.empty()) throw DomainError("mat_poly_eval: empty coefficient list");
  const auto d = M.rows();
  const CMatrix I = CMatrix::Identity(d, d);
  CMatrix acc = coeffs.back() * I;
  for (auto k = coeffs.size() - 1; k-- > 0;) {
    acc = M * acc + coeffs[k] * I;
  }
  return acc;
}

CMatrix mat_exp(const CMatrix& M) {
  require_square(M, "mat_exp");
  if (!all_finite(M)) throw DomainError("mat_exp: non-finite entries");
  const auto d = M.rows();

  // Scale so that the Taylor series converges in a handful of terms.
  const double norm = one_norm(M);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMatrix S = M / std::ldexp(1.0, squarings);

  CMatrix result = CMatrix::Identity(d, d);
  CMatrix term = CMatrix::Identity(d, d);
  for (int k = 1; k < 64; ++k) {
    term = (term * S) / static_cast<double>(k);
    result += term;
    if (one_norm(term) < 1e-18 * one_norm(result)) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CVector exact_linear_flow(const CMatrix& A, Complex t0, Complex t, const CVector& x0) {
  require_square(A, "exact_linear_flow");
  if (A.rows() != x0.size()) throw DimensionError("exact_linear_flow: dim(A) != dim(x0)");
  if (t == t0) return x0;
  return mat_exp((t - t0) * A) * x0;
}

}  // namespace cxgrid
