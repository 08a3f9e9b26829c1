#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tpls/shops.hpp"

namespace tpls {

// Elbow of a descending eigenvalue sequence: the index k (1-based) maximizing
// the forward second difference lam_k - 2 lam_{k+1} + lam_{k+2}, ties broken
// toward the smallest k. Sequences shorter than 3 return 1.
int elbow_index(std::span<const double> eigenvalues_desc);

// Component-count upper bound from the covariate covariance scree, clamped
// to [1, min(n, d1) - 1].
int elbow_K(const Matrix& X);

struct CvOptions {
  std::vector<double> nu_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int folds = 5;
  ThresholdSpec spec;  // nu is overridden per grid point
  HooiOptions hooi;
  bool center = true;  // training-fold centering applied to validation folds
};

struct CvCell {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;  // folds that reached this component count
};

struct CvResult {
  int K_max = 0;
  std::vector<double> nu_grid;
  std::vector<std::vector<CvCell>> table;  // [k-1][nu index]
  int chosen_K = 0;
  double chosen_nu = 0.0;
  std::vector<int> fold_of;  // fold id per sample
  std::uint64_t seed = 0;
  int fit_count = 0;  // total shops_fit invocations (folds x grid points)
  bool any_truncated = false;

  const CvCell& cell(int k, int nu_index) const;
};

// Joint grid search over (component count, nu): per fold and nu, ONE sparse
// fit with K_max components supplies validation errors for every k <= K_max
// via the stage observer. Validation error is ||Y_val - B_k x1 X_val||_F /
// sqrt(n_val) averaged over contributing folds; the winner is the minimal
// mean, ties toward smaller K then smaller nu. Per-cell RNG streams are
// derived from (seed, fold, nu index) so concurrent and sequential execution
// agree exactly.
CvResult cross_validate(const Tensor3& Y, const Matrix& X, int K_max, const CvOptions& options,
                        std::uint64_t seed);

}  // namespace tpls
