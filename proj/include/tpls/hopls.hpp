#pragma once

#include <string>
#include <vector>

#include "tpls/decomp.hpp"
#include "tpls/tensor.hpp"

namespace tpls {

// Cross-covariance tensor Y x1 X'/n of a response tensor (samples on mode 1)
// against a covariate matrix with matching row count. Result is d1 x d2 x d3.
Tensor3 cov_tensor(const Tensor3& Y, const Matrix& X);

// Fitted higher-order PLS state for K extracted components.
struct HoplsModel {
  int requested_components = 0;
  int components = 0;       // achieved count (== requested unless truncated)
  Matrix W;                 // d1 x K direction matrix
  Matrix Q2, Q3;            // unit loading columns, d2 x K and d3 x K
  Matrix T_scores;          // n x K
  Matrix P;                 // d1 x K
  std::vector<double> G;    // superdiagonal core entries
  Tensor3 B;                // d1 x d2 x d3 coefficient estimate
  std::vector<HooiResult> hooi;  // per-component decompositions
  bool truncated = false;
  std::string warning;
};

// Iterative fit: per component, rank-(1,1,1) decomposition of the deflated
// cross-covariance tensor, score extraction, and score-space projector
// deflation of the original response and covariates. The caller is expected
// to pass column-centered X and mode-1-centered Y (see Centering).
HoplsModel hopls_fit(const Tensor3& Y, const Matrix& X, int K, const HooiOptions& opts = {});

// B x1 Xnew for any coefficient tensor.
Tensor3 coeff_predict(const Tensor3& B, const Matrix& Xnew);

Tensor3 hopls_predict(const HoplsModel& model, const Matrix& Xnew);

// Per-response-entry least squares baseline; minimum-norm solution via the
// covariate pseudoinverse when X is rank deficient or n <= d1.
Tensor3 ols_fit(const Tensor3& Y, const Matrix& X);

// Column means of X and per-(j,k) sample means of Y, so models can be fit on
// centered data and still predict on raw inputs.
struct Centering {
  Eigen::RowVectorXd x_mean;  // 1 x d1
  Matrix y_mean;              // d2 x d3

  static Centering fit(const Tensor3& Y, const Matrix& X);
  Matrix center_x(const Matrix& X) const;
  Tensor3 center_y(const Tensor3& Y) const;
  // Adds the stored response means back onto a centered prediction.
  Tensor3 uncenter_y(Tensor3 Y) const;
};

}  // namespace tpls
