#include "tpls/hopls.hpp"

#include <cmath>

namespace tpls {

Tensor3 cov_tensor(const Tensor3& Y, const Matrix& X) {
  const int n = Y.dims().d1;
  if (X.rows() != n)
    throw_shape("cov_tensor: Y has " + std::to_string(n) + " samples, X has " +
                std::to_string(X.rows()) + " rows");
  if (n == 0) throw_shape("cov_tensor: empty sample dimension");
  Tensor3 S = mode_multiply(Y, Matrix(X.transpose()), 1);
  scale_inplace(S, 1.0 / static_cast<double>(n));
  return S;
}

HoplsModel hopls_fit(const Tensor3& Y, const Matrix& X, int K, const HooiOptions& opts) {
  const Dims3 yd = Y.dims();
  const int n = yd.d1;
  const int d1 = static_cast<int>(X.cols());
  if (X.rows() != n)
    throw_shape("hopls_fit: X rows " + std::to_string(X.rows()) + " != samples " + std::to_string(n));
  if (K < 1) throw_compute("hopls_fit: K must be >= 1");
  if (K > std::min(n, d1))
    throw_compute("hopls_fit: K = " + std::to_string(K) + " exceeds min(n, d1) = " +
                  std::to_string(std::min(n, d1)));

  HoplsModel model;
  model.requested_components = K;

  const Tensor3 S_full = cov_tensor(Y, X);
  const double s_scale = frobenius_norm(S_full);

  Tensor3 Yk = Y;
  Matrix Xk = X;
  Matrix T(n, 0);
  Matrix Q1(d1, 0), Q2(yd.d2, 0), Q3(yd.d3, 0);

  for (int k = 0; k < K; ++k) {
    const Tensor3 Sk = cov_tensor(Yk, Xk);
    if (frobenius_norm(Sk) <= 1e-12 * s_scale) {
      model.truncated = true;
      model.warning = "signal exhausted after " + std::to_string(k) + " components";
      break;
    }
    HooiResult h = hooi_rank1(Sk, opts);
    if (h.degenerate) {
      model.truncated = true;
      model.warning = "degenerate covariance tensor at component " + std::to_string(k + 1);
      break;
    }

    const Vector t = Xk * h.q1;
    if (t.norm() <= 1e-12 * std::max(1.0, X.norm())) {
      model.truncated = true;
      model.warning = "score collapse at component " + std::to_string(k + 1);
      break;
    }

    T.conservativeResize(Eigen::NoChange, k + 1);
    T.col(k) = t;
    Q1.conservativeResize(Eigen::NoChange, k + 1);
    Q1.col(k) = h.q1;
    Q2.conservativeResize(Eigen::NoChange, k + 1);
    Q2.col(k) = h.q2;
    Q3.conservativeResize(Eigen::NoChange, k + 1);
    Q3.col(k) = h.q3;
    model.hooi.push_back(std::move(h));

    // Cumulative projector deflation of the original data.
    const Matrix proj = Matrix::Identity(n, n) - T * pinv(T);
    Yk = mode_multiply(Y, proj, 1);
    Xk = proj * X;
  }

  const int achieved = static_cast<int>(model.hooi.size());
  model.components = achieved;
  if (achieved == 0) {
    model.W = Matrix::Zero(d1, 0);
    model.Q2 = Q2;
    model.Q3 = Q3;
    model.T_scores = T;
    model.P = Matrix::Zero(d1, 0);
    model.B = Tensor3(Dims3{d1, yd.d2, yd.d3});
    return model;
  }

  const Matrix S_X = X.transpose() * X / static_cast<double>(n);
  model.P = X.transpose() * T * pinv(T.transpose() * T);
  model.W = Q1 * pinv(model.P.transpose() * Q1);
  model.Q2 = Q2;
  model.Q3 = Q3;
  model.T_scores = T;

  model.G.resize(static_cast<std::size_t>(achieved));
  for (int k = 0; k < achieved; ++k)
    model.G[static_cast<std::size_t>(k)] =
        contract3(S_full, model.W.col(k), Q2.col(k), Q3.col(k));

  const Tensor3 core = superdiag(model.G);
  const Matrix M1 = model.W * pinv(model.W.transpose() * S_X * model.W);
  model.B = mode_multiply(mode_multiply(mode_multiply(core, M1, 1), Q2, 2), Q3, 3);
  return model;
}

Tensor3 coeff_predict(const Tensor3& B, const Matrix& Xnew) {
  if (Xnew.cols() != B.dims().d1)
    throw_shape("predict: Xnew has " + std::to_string(Xnew.cols()) + " columns, coefficients need " +
                std::to_string(B.dims().d1));
  return mode_multiply(B, Xnew, 1);
}

Tensor3 hopls_predict(const HoplsModel& model, const Matrix& Xnew) {
  return coeff_predict(model.B, Xnew);
}

Tensor3 ols_fit(const Tensor3& Y, const Matrix& X) {
  if (X.rows() != Y.dims().d1) throw_shape("ols_fit: sample count mismatch");
  return mode_multiply(Y, pinv(X), 1);
}

Centering Centering::fit(const Tensor3& Y, const Matrix& X) {
  const int n = Y.dims().d1;
  if (X.rows() != n) throw_shape("Centering::fit: sample count mismatch");
  if (n == 0) throw_shape("Centering::fit: no samples");
  Centering c;
  c.x_mean = X.colwise().mean();
  c.y_mean = Matrix::Zero(Y.dims().d2, Y.dims().d3);
  for (int i = 0; i < n; ++i) {
    const double* s = Y.slice(i);
    for (int j = 0; j < Y.dims().d2; ++j)
      for (int k = 0; k < Y.dims().d3; ++k)
        c.y_mean(j, k) += s[static_cast<std::int64_t>(j) * Y.dims().d3 + k];
  }
  c.y_mean /= static_cast<double>(n);
  return c;
}

Matrix Centering::center_x(const Matrix& X) const {
  if (X.cols() != x_mean.cols()) throw_shape("Centering: X column count mismatch");
  return X.rowwise() - x_mean;
}

Tensor3 Centering::center_y(const Tensor3& Y) const {
  if (Y.dims().d2 != y_mean.rows() || Y.dims().d3 != y_mean.cols())
    throw_shape("Centering: Y slice dims mismatch");
  Tensor3 out = Y;
  for (int i = 0; i < Y.dims().d1; ++i) {
    double* s = out.slice(i);
    for (int j = 0; j < Y.dims().d2; ++j)
      for (int k = 0; k < Y.dims().d3; ++k)
        s[static_cast<std::int64_t>(j) * Y.dims().d3 + k] -= y_mean(j, k);
  }
  return out;
}

Tensor3 Centering::uncenter_y(Tensor3 Y) const {
  if (Y.dims().d2 != y_mean.rows() || Y.dims().d3 != y_mean.cols())
    throw_shape("Centering: Y slice dims mismatch");
  for (int i = 0; i < Y.dims().d1; ++i) {
    double* s = Y.slice(i);
    for (int j = 0; j < Y.dims().d2; ++j)
      for (int k = 0; k < Y.dims().d3; ++k)
        s[static_cast<std::int64_t>(j) * Y.dims().d3 + k] += y_mean(j, k);
  }
  return Y;
}

}  // namespace tpls
