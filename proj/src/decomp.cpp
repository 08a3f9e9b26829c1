#include "tpls/decomp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cassert>
#include <cmath>

namespace tpls {

double apply_sign_convention(Vector& v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v.size() > 0 && v[arg] < 0.0) {
    v = -v;
    return -1.0;
  }
  return 1.0;
}

SvdTriple svd_leading(const Matrix& M) {
  SvdTriple out;
  if (M.size() == 0 || M.isZero(0.0)) {
    out.u = Vector::Zero(std::max<Eigen::Index>(1, M.rows()));
    out.v = Vector::Zero(std::max<Eigen::Index>(1, M.cols()));
    out.u[0] = 1.0;
    out.v[0] = 1.0;
    out.sigma = 0.0;
    out.degenerate = true;
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU().col(0);
  out.v = svd.matrixV().col(0);
  out.sigma = svd.singularValues()[0];
  const double flip = apply_sign_convention(out.u);
  out.v *= flip;
  return out;
}

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Mode-m Gram matrix unfold(T,m)' * unfold(T,m), built from the contiguous
// layout without materializing the unfolding.
Matrix mode_gram(const Tensor3& T, int mode) {
  const Dims3 d = T.dims();
  if (mode == 1) {
    RowMajorMap M(T.data(), d.d1, static_cast<Eigen::Index>(d.d2) * d.d3);
    return M * M.transpose();
  }
  if (mode == 3) {
    RowMajorMap M(T.data(), static_cast<Eigen::Index>(d.d1) * d.d2, d.d3);
    return M.transpose() * M;
  }
  Matrix G = Matrix::Zero(d.d2, d.d2);
  for (int i = 0; i < d.d1; ++i) {
    RowMajorMap S(T.slice(i), d.d2, d.d3);
    G.noalias() += S * S.transpose();
  }
  return G;
}

Vector hosvd_loading(const Tensor3& T, int mode) {
  // Leading eigenvector of the mode-m Gram matrix; identical to the leading
  // left singular vector of unfold(T,m)'.
  Eigen::SelfAdjointEigenSolver<Matrix> es(mode_gram(T, mode));
  Vector q = es.eigenvectors().col(es.eigenvectors().cols() - 1);  // largest is last
  apply_sign_convention(q);
  return q;
}

}  // namespace

HooiResult hooi_rank1(const Tensor3& T, const HooiOptions& opts) {
  if (opts.max_iterations < 1) throw_compute("hooi_rank1: max_iterations must be >= 1");
  if (!(opts.tolerance > 0.0)) throw_compute("hooi_rank1: tolerance must be positive");

  const Dims3 d = T.dims();
  HooiResult out;
  if (d.count() == 0 || max_abs(T) == 0.0) {
    out.q1 = Vector::Zero(std::max(1, d.d1));
    out.q2 = Vector::Zero(std::max(1, d.d2));
    out.q3 = Vector::Zero(std::max(1, d.d3));
    out.q1[0] = out.q2[0] = out.q3[0] = 1.0;
    out.degenerate = true;
    return out;
  }

  Vector q[3];
  if (opts.init == HooiOptions::Init::hosvd) {
    for (int m = 0; m < 3; ++m) q[m] = hosvd_loading(T, m + 1);
  } else {
    for (int m = 0; m < 3; ++m)
      q[m] = Vector::Constant(d.dim(m + 1), 1.0 / std::sqrt(static_cast<double>(d.dim(m + 1))));
  }

#ifndef NDEBUG
  double prev_obj = std::abs(contract3(T, q[0], q[1], q[2]));
#endif
  bool converged = false;
  int it = 0;
  while (it < opts.max_iterations && !converged) {
    ++it;
    double delta = 0.0;
    for (int m = 0; m < 3; ++m) {
      const Vector& qa = q[(m + 1) % 3];
      const Vector& qb = q[(m + 2) % 3];
      Vector v = contract_others(T, m + 1, qa, qb);
      const double nv = v.norm();
      if (nv == 0.0) {
        out.degenerate = true;
        break;
      }
      v /= nv;
      // Sign-aligned change: the update direction is defined up to sign.
      const double s = v.dot(q[m]) >= 0.0 ? 1.0 : -1.0;
      delta = std::max(delta, (v - s * q[m]).norm());
      q[m] = v;
    }
    if (out.degenerate) break;
#ifndef NDEBUG
    const double obj = std::abs(contract3(T, q[0], q[1], q[2]));
    assert(obj >= prev_obj - 1e-10 * std::max(1.0, prev_obj));
    prev_obj = obj;
#endif
    if (delta <= opts.tolerance) converged = true;
  }

  for (int m = 0; m < 3; ++m) apply_sign_convention(q[m]);
  out.q1 = q[0];
  out.q2 = q[1];
  out.q3 = q[2];
  out.core = contract3(T, out.q1, out.q2, out.q3);
  out.iterations = it;
  out.converged = converged;
  return out;
}

Matrix pinv(const Matrix& M) {
  if (M.size() == 0) return Matrix(M.cols(), M.rows());
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = 1e-12 * (s.size() > 0 ? s[0] : 0.0);
  Vector sinv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff && s[i] > 0.0) sinv[i] = 1.0 / s[i];
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

EigenDesc sym_eigen_desc(const Matrix& S) {
  if (S.rows() != S.cols())
    throw_shape("sym_eigen_desc: matrix is " + std::to_string(S.rows()) + "x" +
                std::to_string(S.cols()));
  const double scale = std::max(1.0, S.size() > 0 ? S.cwiseAbs().maxCoeff() : 0.0);
  const double asym = S.size() > 0 ? (S - S.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10 * scale)
    throw_shape("sym_eigen_desc: input asymmetry " + std::to_string(asym) + " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  const Eigen::Index n = S.rows();
  EigenDesc out;
  out.eigenvalues = Vector(n);
  out.eigenvectors = Matrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = es.eigenvalues()[n - 1 - i];
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    Vector v = out.eigenvectors.col(i);
    apply_sign_convention(v);
    out.eigenvectors.col(i) = v;
  }
  return out;
}

}  // namespace tpls
