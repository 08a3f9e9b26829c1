#include "tpls/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tpls {

namespace {

// Work threshold below which the OpenMP kernels run single-threaded.
constexpr std::int64_t kParallelCutoff = 1 << 14;

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw_shape("mode must be 1, 2, or 3, got " + std::to_string(mode));
}

}  // namespace

std::string Dims3::str() const {
  return "(" + std::to_string(d1) + ", " + std::to_string(d2) + ", " + std::to_string(d3) + ")";
}

bool Tensor3::all_finite() const {
  const double* p = values_.data();
  const std::int64_t n = size();
  for (std::int64_t t = 0; t < n; ++t)
    if (!std::isfinite(p[t])) return false;
  return true;
}

IndexSet IndexSet::full(int mode, int d) {
  IndexSet s;
  s.mode = mode;
  s.indices.resize(d);
  std::iota(s.indices.begin(), s.indices.end(), 0);
  return s;
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

void IndexSet::validate(int d) const {
  if (mode < 1 || mode > 3) throw_shape("IndexSet: invalid mode " + std::to_string(mode));
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] < 0 || indices[t] >= d)
      throw_shape("IndexSet: index " + std::to_string(indices[t] + 1) + " out of range [1, " +
                  std::to_string(d) + "] on mode " + std::to_string(mode));
    if (t > 0 && indices[t] <= indices[t - 1])
      throw_shape("IndexSet: indices must be strictly increasing on mode " + std::to_string(mode));
  }
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.mode = a.mode;
  std::set_union(a.indices.begin(), a.indices.end(), b.indices.begin(), b.indices.end(),
                 std::back_inserter(out.indices));
  return out;
}

Tensor3 mode_multiply(const Tensor3& T, const Matrix& A, int mode) {
  check_mode(mode);
  const Dims3 d = T.dims();
  if (A.cols() != d.dim(mode))
    throw_shape("mode_multiply: A has " + std::to_string(A.cols()) + " cols, mode " +
                std::to_string(mode) + " of " + d.str() + " needs " + std::to_string(d.dim(mode)));
  const int r = static_cast<int>(A.rows());

  if (mode == 1) {
    Tensor3 out(Dims3{r, d.d2, d.d3});
    const std::int64_t sl = static_cast<std::int64_t>(d.d2) * d.d3;
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(r) * d.d1 * sl > kParallelCutoff)
    for (int q = 0; q < r; ++q) {
      double* dst = out.slice(q);
      for (int i = 0; i < d.d1; ++i) {
        const double a = A(q, i);
        if (a == 0.0) continue;
        const double* src = T.slice(i);
        for (std::int64_t t = 0; t < sl; ++t) dst[t] += a * src[t];
      }
    }
    return out;
  }

  if (mode == 2) {
    Tensor3 out(Dims3{d.d1, r, d.d3});
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(d.d1) * r * d.d2 * d.d3 > kParallelCutoff)
    for (int i = 0; i < d.d1; ++i) {
      const double* src = T.slice(i);
      double* dst = out.slice(i);
      for (int q = 0; q < r; ++q) {
        double* row = dst + static_cast<std::int64_t>(q) * d.d3;
        for (int j = 0; j < d.d2; ++j) {
          const double a = A(q, j);
          if (a == 0.0) continue;
          const double* fiber = src + static_cast<std::int64_t>(j) * d.d3;
          for (int k = 0; k < d.d3; ++k) row[k] += a * fiber[k];
        }
      }
    }
    return out;
  }

  Tensor3 out(Dims3{d.d1, d.d2, r});
  const std::int64_t rows12 = static_cast<std::int64_t>(d.d1) * d.d2;
#pragma omp parallel for schedule(static) if (rows12 * d.d3 * r > kParallelCutoff)
  for (std::int64_t ij = 0; ij < rows12; ++ij) {
    const double* fiber = T.data() + ij * d.d3;
    double* dst = out.data() + ij * r;
    for (int q = 0; q < r; ++q) {
      double acc = 0.0;
      for (int k = 0; k < d.d3; ++k) acc += A(q, k) * fiber[k];
      dst[q] = acc;
    }
  }
  return out;
}

Matrix unfold(const Tensor3& T, int mode) {
  check_mode(mode);
  const Dims3 d = T.dims();
  const std::int64_t rows = d.count() / std::max(1, d.dim(mode));
  Matrix M(rows, d.dim(mode));
  if (d.count() == 0) return M;

  if (mode == 1) {
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int i = 0; i < d.d1; ++i)
      for (int j = 0; j < d.d2; ++j)
        for (int k = 0; k < d.d3; ++k)
          M(static_cast<std::int64_t>(j) * d.d3 + k, i) = T.at(i, j, k);
  } else if (mode == 2) {
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int k = 0; k < d.d3; ++k)
      for (int i = 0; i < d.d1; ++i)
        for (int j = 0; j < d.d2; ++j)
          M(static_cast<std::int64_t>(k) * d.d1 + i, j) = T.at(i, j, k);
  } else {
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int i = 0; i < d.d1; ++i)
      for (int j = 0; j < d.d2; ++j)
        for (int k = 0; k < d.d3; ++k)
          M(static_cast<std::int64_t>(i) * d.d2 + j, k) = T.at(i, j, k);
  }
  return M;
}

Tensor3 fold(const Matrix& M, int mode, Dims3 dims) {
  check_mode(mode);
  const std::int64_t rows = dims.count() / std::max(1, dims.dim(mode));
  if (M.rows() != rows || M.cols() != dims.dim(mode))
    throw_shape("fold: matrix is " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()) +
                ", mode-" + std::to_string(mode) + " unfolding of " + dims.str() + " is " +
                std::to_string(rows) + "x" + std::to_string(dims.dim(mode)));
  Tensor3 T(dims);
  if (dims.count() == 0) return T;

  if (mode == 1) {
#pragma omp parallel for schedule(static) if (dims.count() > kParallelCutoff)
    for (int i = 0; i < dims.d1; ++i)
      for (int j = 0; j < dims.d2; ++j)
        for (int k = 0; k < dims.d3; ++k)
          T.at(i, j, k) = M(static_cast<std::int64_t>(j) * dims.d3 + k, i);
  } else if (mode == 2) {
#pragma omp parallel for schedule(static) if (dims.count() > kParallelCutoff)
    for (int i = 0; i < dims.d1; ++i)
      for (int j = 0; j < dims.d2; ++j)
        for (int k = 0; k < dims.d3; ++k)
          T.at(i, j, k) = M(static_cast<std::int64_t>(k) * dims.d1 + i, j);
  } else {
#pragma omp parallel for schedule(static) if (dims.count() > kParallelCutoff)
    for (int i = 0; i < dims.d1; ++i)
      for (int j = 0; j < dims.d2; ++j)
        for (int k = 0; k < dims.d3; ++k)
          T.at(i, j, k) = M(static_cast<std::int64_t>(i) * dims.d2 + j, k);
  }
  return T;
}

double frobenius_norm(const Tensor3& T) {
  // Fixed-size chunks with a serial combine keep the result independent of
  // the number of threads.
  const std::int64_t n = T.size();
  if (n == 0) return 0.0;
  constexpr std::int64_t chunk = 1 << 13;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
  const double* p = T.data();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    double acc = 0.0;
    for (std::int64_t t = lo; t < hi; ++t) acc += p[t] * p[t];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return std::sqrt(total);
}

Tensor3 outer3(const Vector& u, const Vector& v, const Vector& w) {
  const int d1 = static_cast<int>(u.size());
  const int d2 = static_cast<int>(v.size());
  const int d3 = static_cast<int>(w.size());
  Tensor3 T(Dims3{d1, d2, d3});
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(d1) * d2 * d3 > kParallelCutoff)
  for (int i = 0; i < d1; ++i) {
    double* dst = T.slice(i);
    for (int j = 0; j < d2; ++j) {
      const double uv = u[i] * v[j];
      double* row = dst + static_cast<std::int64_t>(j) * d3;
      for (int k = 0; k < d3; ++k) row[k] = uv * w[k];
    }
  }
  return T;
}

Vector kron(const Vector& u, const Vector& v) {
  Vector out(u.size() * v.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < v.size(); ++j) out[i * v.size() + j] = u[i] * v[j];
  return out;
}

Tensor3 superdiag(const std::vector<double>& g) {
  const int K = static_cast<int>(g.size());
  Tensor3 T(Dims3{K, K, K});
  for (int k = 0; k < K; ++k) T.at(k, k, k) = g[static_cast<std::size_t>(k)];
  return T;
}

namespace {

IndexSet resolve(const std::optional<IndexSet>& s, int mode, int d) {
  if (!s) return IndexSet::full(mode, d);
  if (s->mode != mode)
    throw_shape("extract: set tagged mode " + std::to_string(s->mode) + " used on mode " +
                std::to_string(mode));
  s->validate(d);
  return *s;
}

}  // namespace

Tensor3 extract(const Tensor3& T, const std::optional<IndexSet>& s1,
                const std::optional<IndexSet>& s2, const std::optional<IndexSet>& s3) {
  const Dims3 d = T.dims();
  const IndexSet a = resolve(s1, 1, d.d1);
  const IndexSet b = resolve(s2, 2, d.d2);
  const IndexSet c = resolve(s3, 3, d.d3);
  Tensor3 out(Dims3{a.size(), b.size(), c.size()});
#pragma omp parallel for schedule(static) if (out.size() > kParallelCutoff)
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      for (int k = 0; k < c.size(); ++k)
        out.at(i, j, k) = T.at(a.indices[i], b.indices[j], c.indices[k]);
  return out;
}

Tensor3 scatter_back(const Tensor3& sub, Dims3 dims, const std::optional<IndexSet>& s1,
                     const std::optional<IndexSet>& s2, const std::optional<IndexSet>& s3) {
  const IndexSet a = resolve(s1, 1, dims.d1);
  const IndexSet b = resolve(s2, 2, dims.d2);
  const IndexSet c = resolve(s3, 3, dims.d3);
  if (sub.dims() != Dims3{a.size(), b.size(), c.size()})
    throw_shape("scatter_back: subtensor dims " + sub.dims().str() + " do not match index sets");
  Tensor3 out(dims);
#pragma omp parallel for schedule(static) if (sub.size() > kParallelCutoff)
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      for (int k = 0; k < c.size(); ++k)
        out.at(a.indices[i], b.indices[j], c.indices[k]) = sub.at(i, j, k);
  return out;
}

Vector contract_others(const Tensor3& T, int mode, const Vector& qa, const Vector& qb) {
  check_mode(mode);
  const Dims3 d = T.dims();
  Vector out(d.dim(mode));

  if (mode == 1) {
    if (qa.size() != d.d2 || qb.size() != d.d3) throw_shape("contract_others: vector length mismatch");
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int i = 0; i < d.d1; ++i) {
      const double* src = T.slice(i);
      double acc = 0.0;
      for (int j = 0; j < d.d2; ++j) {
        const double* fiber = src + static_cast<std::int64_t>(j) * d.d3;
        double inner = 0.0;
        for (int k = 0; k < d.d3; ++k) inner += fiber[k] * qb[k];
        acc += qa[j] * inner;
      }
      out[i] = acc;
    }
  } else if (mode == 2) {
    if (qa.size() != d.d3 || qb.size() != d.d1) throw_shape("contract_others: vector length mismatch");
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int j = 0; j < d.d2; ++j) {
      double acc = 0.0;
      for (int i = 0; i < d.d1; ++i) {
        const double* fiber = T.slice(i) + static_cast<std::int64_t>(j) * d.d3;
        double inner = 0.0;
        for (int k = 0; k < d.d3; ++k) inner += fiber[k] * qa[k];
        acc += qb[i] * inner;
      }
      out[j] = acc;
    }
  } else {
    if (qa.size() != d.d1 || qb.size() != d.d2) throw_shape("contract_others: vector length mismatch");
#pragma omp parallel for schedule(static) if (d.count() > kParallelCutoff)
    for (int k = 0; k < d.d3; ++k) {
      double acc = 0.0;
      for (int i = 0; i < d.d1; ++i) {
        const double* src = T.slice(i);
        double inner = 0.0;
        for (int j = 0; j < d.d2; ++j) inner += src[static_cast<std::int64_t>(j) * d.d3 + k] * qb[j];
        acc += qa[i] * inner;
      }
      out[k] = acc;
    }
  }
  return out;
}

double contract3(const Tensor3& T, const Vector& q1, const Vector& q2, const Vector& q3) {
  const Vector v = contract_others(T, 1, q2, q3);
  if (q1.size() != v.size()) throw_shape("contract3: mode-1 vector length mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += q1[i] * v[i];
  return acc;
}

Tensor3 subtract(const Tensor3& A, const Tensor3& B) {
  if (A.dims() != B.dims())
    throw_shape("subtract: dims " + A.dims().str() + " vs " + B.dims().str());
  Tensor3 out(A.dims());
  const std::int64_t n = A.size();
  const double* pa = A.data();
  const double* pb = B.data();
  double* po = out.data();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (std::int64_t t = 0; t < n; ++t) po[t] = pa[t] - pb[t];
  return out;
}

Tensor3 add(const Tensor3& A, const Tensor3& B) {
  if (A.dims() != B.dims()) throw_shape("add: dims " + A.dims().str() + " vs " + B.dims().str());
  Tensor3 out(A.dims());
  const std::int64_t n = A.size();
  const double* pa = A.data();
  const double* pb = B.data();
  double* po = out.data();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (std::int64_t t = 0; t < n; ++t) po[t] = pa[t] + pb[t];
  return out;
}

void scale_inplace(Tensor3& T, double alpha) {
  const std::int64_t n = T.size();
  double* p = T.data();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (std::int64_t t = 0; t < n; ++t) p[t] *= alpha;
}

double max_abs(const Tensor3& T) {
  const std::int64_t n = T.size();
  const double* p = T.data();
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (n > kParallelCutoff)
  for (std::int64_t t = 0; t < n; ++t) m = std::max(m, std::abs(p[t]));
  return m;
}

}  // namespace tpls
