#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tpls/hopls.hpp"
#include "tpls/rng.hpp"
#include "tpls/tensor.hpp"

namespace tpls {

// Thresholding configuration. nu0 scales the entrywise soft threshold on the
// covariance tensor; nu is the fraction-of-max cutoff on the loading scores;
// robust_scale switches the noise-scale estimate between MAD-based and
// standard-deviation-based.
struct ThresholdSpec {
  double nu0 = 1.6448536269514722;  // standard normal 95% quantile
  double nu = 0.5;                  // in (0, 1)
  bool robust_scale = true;

  void validate() const;
};

// Standard normal 75% quantile, the MAD-to-sigma conversion constant.
inline constexpr double kNormalQuantile75 = 0.6744897501960817;

// Entrywise shrink-toward-zero: x -> x - t for x >= t, 0 for |x| < t,
// x + t for x <= -t.
Tensor3 soft_threshold(const Tensor3& S, double t);

struct SampleSplit {
  std::vector<int> omega1;  // ceil(n/2) indices, ascending
  std::vector<int> omega2;  // complement, ascending
};

// Uniform random split of [n] into halves of sizes (ceil(n/2), floor(n/2)).
SampleSplit split_samples(int n, Rng& rng);

struct TauEstimate {
  double tau = 0.0;
  int sd_fallback_columns = 0;  // columns whose MAD was zero
};

// Noise-scale-based soft-threshold level: tau = nu0 * sqrt(n1) * sigma_hat
// with sigma_hat = (scale over X columns) * (scale of the response entries)
// / sqrt(n1); the applied entrywise threshold is tau / sqrt(n1). The column
// scale is the median over columns of MAD(X_i)/q75 (or of s.d.(X_i) when
// robust_scale is off); a zero-MAD column falls back to its standard
// deviation and is counted in sd_fallback_columns.
TauEstimate estimate_tau(const Tensor3& Yk, const Matrix& X, const ThresholdSpec& spec, int n1);

// Indices whose |score| exceeds nu * max |score|; empty when the max is 0.
IndexSet select_fraction_of_max(const Vector& scores, double nu, int mode);

struct ActiveSetResult {
  std::array<IndexSet, 3> sets;
  std::array<Vector, 3> scores;  // loading scores on the held-out half
  HooiResult hooi;               // decomposition of the thresholded tensor
  double applied_threshold = 0.0;
  bool no_signal = false;  // thresholding removed everything
};

// One round of active-set finding: sample split, split-half covariance
// tensors, entrywise soft threshold of the first half, rank-(1,1,1) loadings
// of the thresholded tensor, and fraction-of-max selection of the held-out
// half's loading scores per mode.
ActiveSetResult active_set_find(const Tensor3& Yk, const Matrix& Xk, double tau_k, double nu,
                                Rng& rng, const HooiOptions& opts = {});

// Y x1 (I - X W (W' S_X W)^-1 W' X'), computed against the original data.
Tensor3 deflate_response(const Tensor3& Y, const Matrix& X, const Matrix& Wk);

// Found and cumulative index sets per component.
struct StageSets {
  std::array<IndexSet, 3> found;       // this component's sets
  std::array<IndexSet, 3> cumulative;  // union over components so far
  double tau = 0.0;
  bool no_signal = false;
};

struct ActiveSets {
  std::vector<StageSets> stages;
  const std::array<IndexSet, 3>& cumulative() const;
};

struct ShopsModel {
  int requested_components = 0;
  int components = 0;
  ActiveSets sets;
  Tensor3 B;                           // zeros outside the cumulative cuboid
  Matrix W;                            // d1 x K, zero rows outside mode-1 set
  std::vector<HoplsModel> stage_fits;  // reduced-data fit per component
  ThresholdSpec thresholds;
  std::vector<double> taus;
  std::uint64_t seed = 0;
  bool truncated = false;
  std::string warning;
};

// Called after each component with the stage index (1-based), the stage's
// full-size coefficient tensor, and the sets so far.
using StageObserver = std::function<void(int, const Tensor3&, const ActiveSets&)>;

// Sparse fit: per component, threshold-based active-set finding on the
// deflated response against the original covariates, cumulative-union of the
// sets, a reduced-data PLS refit scattered into full-size coefficients, and
// response deflation through the fitted direction matrix.
ShopsModel shops_fit(const Tensor3& Y, const Matrix& X, int K, const ThresholdSpec& spec,
                     const HooiOptions& opts, std::uint64_t seed,
                     const StageObserver& observer = {});

Tensor3 shops_predict(const ShopsModel& model, const Matrix& Xnew);

}  // namespace tpls
