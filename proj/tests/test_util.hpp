#pragma once

#include "tpls/rng.hpp"
#include "tpls/tensor.hpp"

namespace tpls::testutil {

inline Tensor3 random_tensor(Dims3 dims, Rng& rng) {
  Tensor3 T(dims);
  for (std::int64_t t = 0; t < T.size(); ++t) T.data()[t] = rng.gaussian();
  return T;
}

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.gaussian();
  return M;
}

inline Vector random_vector(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

inline Vector random_unit(int n, Rng& rng) {
  Vector v = random_vector(n, rng);
  return v / v.norm();
}

inline Dims3 random_dims(Rng& rng, int max1 = 7, int max2 = 6, int max3 = 5) {
  return Dims3{1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max1))),
               1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max2))),
               1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max3)))};
}

inline double rel_diff(const Tensor3& a, const Tensor3& b) {
  const double scale = std::max(1e-300, frobenius_norm(b));
  return frobenius_norm(subtract(a, b)) / scale;
}

// n x d matrix with orthonormal columns scaled by sqrt(n), so X'X/n = I.
inline Matrix scaled_orthonormal(int n, int d, Rng& rng) {
  Matrix Z = random_matrix(n, d, rng);
  const Eigen::HouseholderQR<Matrix> qr(Z);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, d);
  return std::sqrt(static_cast<double>(n)) * Q;
}

}  // namespace tpls::testutil
