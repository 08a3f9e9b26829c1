#pragma once

#include "tpls/tensor.hpp"

// Serial reference implementations of the tensor kernels. Each routine is a
// literal loop transcription of the defining formula, with no OpenMP, no
// blocking, and no layout tricks. They exist so tests and the kernel
// benchmark can compare the parallel kernels against an independent path.

namespace tpls::ref {

Tensor3 mode_multiply(const Tensor3& T, const Matrix& A, int mode);
Matrix unfold(const Tensor3& T, int mode);
Tensor3 fold(const Matrix& M, int mode, Dims3 dims);
double frobenius_norm(const Tensor3& T);
Tensor3 outer3(const Vector& u, const Vector& v, const Vector& w);
Tensor3 extract(const Tensor3& T, const IndexSet& s1, const IndexSet& s2, const IndexSet& s3);
Vector contract_others(const Tensor3& T, int mode, const Vector& qa, const Vector& qb);
Tensor3 soft_threshold(const Tensor3& S, double t);

}  // namespace tpls::ref
