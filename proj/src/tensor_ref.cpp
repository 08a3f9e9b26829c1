#include "tpls/tensor_ref.hpp"

#include <cmath>

namespace tpls::ref {

Tensor3 mode_multiply(const Tensor3& T, const Matrix& A, int mode) {
  const Dims3 d = T.dims();
  if (A.cols() != d.dim(mode)) throw_shape("ref::mode_multiply: column count mismatch");
  const int r = static_cast<int>(A.rows());
  Dims3 od = d;
  (mode == 1 ? od.d1 : mode == 2 ? od.d2 : od.d3) = r;
  Tensor3 out(od);
  for (int i = 0; i < od.d1; ++i)
    for (int j = 0; j < od.d2; ++j)
      for (int k = 0; k < od.d3; ++k) {
        double acc = 0.0;
        if (mode == 1)
          for (int t = 0; t < d.d1; ++t) acc += T.at(t, j, k) * A(i, t);
        else if (mode == 2)
          for (int t = 0; t < d.d2; ++t) acc += T.at(i, t, k) * A(j, t);
        else
          for (int t = 0; t < d.d3; ++t) acc += T.at(i, j, t) * A(k, t);
        out.at(i, j, k) = acc;
      }
  return out;
}

Matrix unfold(const Tensor3& T, int mode) {
  const Dims3 d = T.dims();
  Matrix M(d.count() / std::max(1, d.dim(mode)), d.dim(mode));
  for (int i = 0; i < d.d1; ++i)
    for (int j = 0; j < d.d2; ++j)
      for (int k = 0; k < d.d3; ++k) {
        if (mode == 1)
          M(static_cast<std::int64_t>(j) * d.d3 + k, i) = T.at(i, j, k);
        else if (mode == 2)
          M(static_cast<std::int64_t>(k) * d.d1 + i, j) = T.at(i, j, k);
        else
          M(static_cast<std::int64_t>(i) * d.d2 + j, k) = T.at(i, j, k);
      }
  return M;
}

Tensor3 fold(const Matrix& M, int mode, Dims3 dims) {
  Tensor3 T(dims);
  for (int i = 0; i < dims.d1; ++i)
    for (int j = 0; j < dims.d2; ++j)
      for (int k = 0; k < dims.d3; ++k) {
        if (mode == 1)
          T.at(i, j, k) = M(static_cast<std::int64_t>(j) * dims.d3 + k, i);
        else if (mode == 2)
          T.at(i, j, k) = M(static_cast<std::int64_t>(k) * dims.d1 + i, j);
        else
          T.at(i, j, k) = M(static_cast<std::int64_t>(i) * dims.d2 + j, k);
      }
  return T;
}

double frobenius_norm(const Tensor3& T) {
  double acc = 0.0;
  for (std::int64_t t = 0; t < T.size(); ++t) acc += T.data()[t] * T.data()[t];
  return std::sqrt(acc);
}

Tensor3 outer3(const Vector& u, const Vector& v, const Vector& w) {
  Tensor3 T(Dims3{static_cast<int>(u.size()), static_cast<int>(v.size()), static_cast<int>(w.size())});
  for (int i = 0; i < T.dims().d1; ++i)
    for (int j = 0; j < T.dims().d2; ++j)
      for (int k = 0; k < T.dims().d3; ++k) T.at(i, j, k) = u[i] * v[j] * w[k];
  return T;
}

Tensor3 extract(const Tensor3& T, const IndexSet& s1, const IndexSet& s2, const IndexSet& s3) {
  Tensor3 out(Dims3{s1.size(), s2.size(), s3.size()});
  for (int i = 0; i < s1.size(); ++i)
    for (int j = 0; j < s2.size(); ++j)
      for (int k = 0; k < s3.size(); ++k)
        out.at(i, j, k) = T.at(s1.indices[i], s2.indices[j], s3.indices[k]);
  return out;
}

Vector contract_others(const Tensor3& T, int mode, const Vector& qa, const Vector& qb) {
  const Dims3 d = T.dims();
  Vector out = Vector::Zero(d.dim(mode));
  for (int i = 0; i < d.d1; ++i)
    for (int j = 0; j < d.d2; ++j)
      for (int k = 0; k < d.d3; ++k) {
        const double v = T.at(i, j, k);
        if (mode == 1)
          out[i] += v * qa[j] * qb[k];
        else if (mode == 2)
          out[j] += v * qa[k] * qb[i];
        else
          out[k] += v * qa[i] * qb[j];
      }
  return out;
}

Tensor3 soft_threshold(const Tensor3& S, double t) {
  Tensor3 out(S.dims());
  for (std::int64_t i = 0; i < S.size(); ++i) {
    const double x = S.data()[i];
    out.data()[i] = x >= t ? x - t : (x <= -t ? x + t : 0.0);
  }
  return out;
}

}  // namespace tpls::ref
