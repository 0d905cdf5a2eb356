#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace cxgrid {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Absolute tolerance used for complex comparisons unless an operation says otherwise.
inline constexpr double kDefaultTolerance = 1e-12;

/// Evaluates sum_k coeffs[k] * M^k by Horner's scheme. Throws DimensionError for
/// non-square M and DomainError for an empty coefficient list.
CMatrix mat_poly_eval(std::span<const Complex> coeffs, const CMatrix& M);

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
CMatrix mat_exp(const CMatrix& M);

/// exp((t - t0) A) x0, the exact flow of x' = A x.
CVector exact_linear_flow(const CMatrix& A, Complex t0, Complex t, const CVector& x0);

bool all_finite(const CMatrix& M);
bool all_finite(const CVector& v);

/// Euclidean norm of the imaginary parts.
double imag_norm(const CVector& v);

}  // namespace cxgrid
