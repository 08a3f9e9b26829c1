#pragma once

#include <Eigen/Dense>
#include <array>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tpls/error.hpp"

namespace tpls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dims3 {
  int d1 = 0, d2 = 0, d3 = 0;

  std::int64_t count() const {
    return static_cast<std::int64_t>(d1) * d2 * d3;
  }
  int dim(int mode) const {
    assert(mode >= 1 && mode <= 3);
    return mode == 1 ? d1 : (mode == 2 ? d2 : d3);
  }
  bool operator==(const Dims3&) const = default;
  std::string str() const;
};

// Dense third-order tensor. Storage is row-major over (i, j, k) with k
// fastest; all public semantics are defined by the mode index maps below,
// not by the layout. Indices are 0-based in the API, 1-based in file formats.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims3 dims, double fill = 0.0)
      : dims_(dims), values_(check_count(dims), fill) {}
  Tensor3(Dims3 dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != dims_.count())
      throw_shape("Tensor3: value count does not match dims " + dims_.str());
  }

  const Dims3& dims() const { return dims_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  bool empty() const { return values_.empty(); }

  double& at(int i, int j, int k) {
    assert(in_range(i, j, k));
    return values_[index(i, j, k)];
  }
  double at(int i, int j, int k) const {
    assert(in_range(i, j, k));
    return values_[index(i, j, k)];
  }

  std::int64_t index(int i, int j, int k) const {
    return (static_cast<std::int64_t>(i) * dims_.d2 + j) * dims_.d3 + k;
  }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  // Pointer to the contiguous (d2*d3)-length block T(i, :, :).
  double* slice(int i) { return values_.data() + static_cast<std::int64_t>(i) * dims_.d2 * dims_.d3; }
  const double* slice(int i) const {
    return values_.data() + static_cast<std::int64_t>(i) * dims_.d2 * dims_.d3;
  }

  bool all_finite() const;

  bool operator==(const Tensor3& other) const {
    return dims_ == other.dims_ && values_ == other.values_;
  }

 private:
  static std::size_t check_count(Dims3 d) {
    if (d.d1 < 0 || d.d2 < 0 || d.d3 < 0)
      throw_shape("Tensor3: negative dimension in " + d.str());
    return static_cast<std::size_t>(d.count());
  }
  bool in_range(int i, int j, int k) const {
    return i >= 0 && i < dims_.d1 && j >= 0 && j < dims_.d2 && k >= 0 && k < dims_.d3;
  }

  Dims3 dims_;
  std::vector<double> values_;
};

// Strictly increasing 0-based index set along one mode.
struct IndexSet {
  int mode = 1;                // 1 | 2 | 3
  std::vector<int> indices;    // ascending, unique

  static IndexSet full(int mode, int d);
  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
  bool contains(int i) const;
  // Throws on duplicates, disorder, or out-of-range entries.
  void validate(int d) const;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);

// --- mode algebra ------------------------------------------------------
//
// The index maps tie every operation together: entry (i, j, k) of T sits at
//   unfold(T,1)(j*d3 + k, i), unfold(T,2)(k*d1 + i, j), unfold(T,3)(i*d2 + j, k)
// (0-based). mode_multiply contracts the chosen mode against the columns of A.

// Contraction of mode m against A (A.cols() must equal the mode-m dimension);
// the mode-m dimension becomes A.rows().
Tensor3 mode_multiply(const Tensor3& T, const Matrix& A, int mode);

Matrix unfold(const Tensor3& T, int mode);
Tensor3 fold(const Matrix& M, int mode, Dims3 dims);

double frobenius_norm(const Tensor3& T);

// Rank-1 tensor u o v o w with entry (i,j,k) = u_i v_j w_k.
Tensor3 outer3(const Vector& u, const Vector& v, const Vector& w);

// Kronecker product of vectors: result((i)*len(v)+j) = u_i v_j. With this
// ordering, unfold(outer3(a,b,c), m) has column i_m equal to the mode-m
// loading entry times kron of the other two loadings taken cyclically
// (m=1: kron(b,c); m=2: kron(c,a); m=3: kron(a,b)).
Vector kron(const Vector& u, const Vector& v);

// K x K x K tensor with g_k at positions (k,k,k) and zeros elsewhere.
Tensor3 superdiag(const std::vector<double>& g);

// Subtensor over the Cartesian product of the given index sets; an absent
// set keeps the full mode. scatter_back places a subtensor into a zero
// tensor of the original dims (exact inverse placement of extract).
Tensor3 extract(const Tensor3& T, const std::optional<IndexSet>& s1,
                const std::optional<IndexSet>& s2, const std::optional<IndexSet>& s3);
Tensor3 scatter_back(const Tensor3& sub, Dims3 dims, const std::optional<IndexSet>& s1,
                     const std::optional<IndexSet>& s2, const std::optional<IndexSet>& s3);

// Contraction against vectors on the two modes other than `mode`; returns
// the length-d_mode vector  v_i = sum_{a,b} T(..i..,a,b) qa_a qb_b  where
// (qa, qb) follow the cyclic order (mode+1, mode+2).
Vector contract_others(const Tensor3& T, int mode, const Vector& qa, const Vector& qb);

// Full contraction T x1 q1' x2 q2' x3 q3'.
double contract3(const Tensor3& T, const Vector& q1, const Vector& q2, const Vector& q3);

// Elementwise helpers.
Tensor3 subtract(const Tensor3& A, const Tensor3& B);
Tensor3 add(const Tensor3& A, const Tensor3& B);
void scale_inplace(Tensor3& T, double alpha);
double max_abs(const Tensor3& T);

}  // namespace tpls
