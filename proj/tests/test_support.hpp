#pragma once

#include <random>

#include "cxgrid/numerics.hpp"

namespace cxgrid::test {

inline CMatrix random_matrix(std::mt19937_64& rng, int d, double scale, bool real = false) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CMatrix M(d, d);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = {u(rng), real ? 0.0 : u(rng)};
  return M;
}

inline CVector random_vector(std::mt19937_64& rng, int d, bool real = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = {u(rng), real ? 0.0 : u(rng)};
  return v;
}

inline double max_abs(const CMatrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace cxgrid::test
