#pragma once

#include "tpls/tensor.hpp"

namespace tpls {

// Leading singular triple. Sign convention: the entry of largest magnitude
// of u is nonnegative (ties resolved toward the lowest index); v is flipped
// together with u so that M ~ sigma * u * v' is preserved.
struct SvdTriple {
  Vector u;
  double sigma = 0.0;
  Vector v;
  bool degenerate = false;  // all-zero input
};

SvdTriple svd_leading(const Matrix& M);

struct HooiOptions {
  enum class Init { hosvd, ones };
  int max_iterations = 200;
  double tolerance = 1e-9;  // on the max sign-aligned loading change
  Init init = Init::hosvd;
};

// Result of the rank-(1,1,1) alternating iteration. Loadings are unit
// vectors under the svd_leading sign convention; core is the tensor fully
// contracted against the returned loadings.
struct HooiResult {
  Vector q1, q2, q3;
  double core = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // zero input tensor
};

// Alternating rank-(1,1,1) updates q_m <- normalize(T contracted against the
// other two loadings), initialized from the per-mode leading loadings
// (Init::hosvd) or normalized all-ones vectors (Init::ones). The contracted
// objective |core| is nondecreasing across sweeps (asserted in debug builds).
HooiResult hooi_rank1(const Tensor3& T, const HooiOptions& opts = {});

// Moore-Penrose pseudoinverse via SVD with singular values below
// 1e-12 * sigma_max truncated to zero. Zero matrices map to zero.
Matrix pinv(const Matrix& M);

struct EigenDesc {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns aligned with eigenvalues
};

// Symmetric eigendecomposition with eigenvalues sorted descending.
// Rejects matrices whose asymmetry exceeds 1e-10 * max(1, max|entry|).
EigenDesc sym_eigen_desc(const Matrix& S);

// Flips v so its largest-magnitude entry (lowest index on ties) is >= 0.
// Returns -1.0 if a flip happened, +1.0 otherwise.
double apply_sign_convention(Vector& v);

}  // namespace tpls
