#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tpls/rng.hpp"
#include "tpls/tensor.hpp"

namespace tpls {

// Synthetic scenario: spiked covariates, an orthogonally decomposable sparse
// coefficient tensor whose first frontal slice draws one of the shipped
// bitmap patterns, and a Gaussian response tensor.
struct SimScenario {
  int n = 120;
  int p = 240;
  int s = 30;   // active covariates; must be divisible by K
  int K = 3;    // latent spike count
  int R = 1;    // coefficient rank; R <= K
  double lambda = 10.0;
  double sigma2 = 2.0;
  double theta1 = 5.0;  // leading coefficient weight (odeco spectral norm)
  int d2 = 64;
  int d3 = 64;
  std::string pattern = "square";
  std::uint64_t seed = 0;
  std::string name;  // optional label for reports

  void validate() const;
  std::string label() const;
};

// Expected rank per shipped pattern bitmap.
const std::map<std::string, int>& builtin_pattern_ranks();

struct GammaBasis {
  Matrix Gamma;  // p x (K+1), orthonormal columns
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  int p = 0, s = 0, K = 0;
};

// Block-sign spike basis. Columns j <= K carry -a0 on the first s entries
// except +a1 on block j (length s/K); column K+1 is a2 on entries s+1..p.
// The constants solve the orthonormality system: a2 = 1/sqrt(p-s),
// a1 = a0 (K-2)/2, and (s - s/K) a0^2 + (s/K) a1^2 = 1. K = 2 makes a1 = 0
// and is rejected as degenerate.
GammaBasis build_gamma(int p, int s, int K);

// X = H Gamma' + E with latent columns h_j ~ N(0, lambda^2 I_n) and
// N(0, 1) noise; column covariance is lambda^2 Gamma Gamma' + I.
Matrix gen_covariates(const GammaBasis& basis, double lambda, int n, Rng& rng);

struct PatternMask {
  Matrix M;  // 0/1 entries
  int rank = 0;
  std::string name;
};

// Plain-text 0/1 grid, one row per line.
PatternMask load_pattern_mask(const std::string& path);
// Resolves "<dir>/<name>.txt".
PatternMask load_builtin_pattern(const std::string& name, const std::string& pattern_dir);

struct CoefficientTruth {
  Tensor3 B;            // p x d2 x d3
  Matrix U1, U2, U3;    // orthonormal loading columns per mode
  std::vector<double> theta;  // descending, theta[0] = theta1
  Matrix C;             // K x R binary combination pattern for mode 1
};

// Rank-R odeco coefficients: mode-2/3 loadings and raw weights from the top
// R singular triples of the mask; mode-1 loadings from disjoint contiguous
// groups of the first K spike directions; weights rescaled so the leading
// weight is theta1.
CoefficientTruth build_pattern_coefficients(const PatternMask& mask, int R, int K,
                                            const GammaBasis& basis, int d2, int d3,
                                            double theta1);

// Y = B x1 X + sigma2 * F with i.i.d. standard normal F.
Tensor3 gen_response(const Matrix& X, const Tensor3& B, double sigma2, Rng& rng);

struct GroundTruth {
  SimScenario scenario;
  Matrix X;       // n x p
  Tensor3 Y;      // n x d2 x d3
  Tensor3 B;      // p x d2 x d3
  GammaBasis basis;
  CoefficientTruth coeff;
  std::array<IndexSet, 3> active;  // true active sets per mode
};

// Full draw for one scenario. The coefficient tensor and spike basis depend
// only on the scenario parameters; the seed drives X and the noise.
GroundTruth generate(const SimScenario& scenario, const std::string& pattern_dir);

// Independent (X, Y) pair from the same truth (fresh latent draws and noise).
void generate_xy(const GammaBasis& basis, const Tensor3& B, double lambda, double sigma2, int n,
                 Rng& rng, Matrix& X_out, Tensor3& Y_out);

// Support of the loading columns at relative tolerance 1e-12.
IndexSet loading_support(const Matrix& U, int mode);

}  // namespace tpls
