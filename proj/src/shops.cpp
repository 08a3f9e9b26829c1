#include "tpls/shops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tpls {

namespace {

constexpr std::int64_t kParallelCutoff = 1 << 14;

double median_inplace(std::vector<double>& v) {
  if (v.empty()) throw_compute("median of empty sequence");
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

double mad(const std::vector<double>& values) {
  std::vector<double> tmp = values;
  const double med = median_inplace(tmp);
  for (double& x : tmp) x = std::abs(x - med);
  return median_inplace(tmp);
}

double stddev(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

Matrix select_rows(const Matrix& X, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Tensor3 select_samples(const Tensor3& Y, const std::vector<int>& rows) {
  const Dims3 d = Y.dims();
  Tensor3 out(Dims3{static_cast<int>(rows.size()), d.d2, d.d3});
  const std::int64_t sl = static_cast<std::int64_t>(d.d2) * d.d3;
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(Y.slice(rows[i]), sl, out.slice(static_cast<int>(i)));
  return out;
}

Matrix select_cols(const Matrix& X, const IndexSet& set) {
  Matrix out(X.rows(), set.size());
  for (int j = 0; j < set.size(); ++j) out.col(j) = X.col(set.indices[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace

void ThresholdSpec::validate() const {
  if (!(nu > 0.0 && nu < 1.0))
    throw_config("threshold spec: nu must lie in (0, 1), got " + std::to_string(nu));
  if (nu0 < 0.0) throw_config("threshold spec: nu0 must be nonnegative");
}

Tensor3 soft_threshold(const Tensor3& S, double t) {
  if (t < 0.0) throw_compute("soft_threshold: negative threshold");
  Tensor3 out(S.dims());
  const std::int64_t n = S.size();
  const double* src = S.data();
  double* dst = out.data();
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = src[i];
    dst[i] = x >= t ? x - t : (x <= -t ? x + t : 0.0);
  }
  return out;
}

SampleSplit split_samples(int n, Rng& rng) {
  if (n < 4) throw_compute("split_samples: need n >= 4, got " + std::to_string(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const int n1 = (n + 1) / 2;
  SampleSplit split;
  split.omega1.assign(perm.begin(), perm.begin() + n1);
  split.omega2.assign(perm.begin() + n1, perm.end());
  std::sort(split.omega1.begin(), split.omega1.end());
  std::sort(split.omega2.begin(), split.omega2.end());
  return split;
}

TauEstimate estimate_tau(const Tensor3& Yk, const Matrix& X, const ThresholdSpec& spec, int n1) {
  if (n1 < 1) throw_compute("estimate_tau: n1 must be positive");
  TauEstimate out;

  std::vector<double> col_scales(static_cast<std::size_t>(X.cols()));
  std::vector<double> col(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) col[static_cast<std::size_t>(i)] = X(i, j);
    if (spec.robust_scale) {
      const double m = mad(col);
      if (m > 0.0) {
        col_scales[static_cast<std::size_t>(j)] = m / kNormalQuantile75;
      } else {
        col_scales[static_cast<std::size_t>(j)] = stddev(col);
        ++out.sd_fallback_columns;
      }
    } else {
      col_scales[static_cast<std::size_t>(j)] = stddev(col);
    }
  }
  const double x_scale = median_inplace(col_scales);

  std::vector<double> entries(Yk.data(), Yk.data() + Yk.size());
  double y_scale;
  if (spec.robust_scale) {
    const double m = mad(entries);
    y_scale = m > 0.0 ? m / kNormalQuantile75 : stddev(entries);
  } else {
    y_scale = stddev(entries);
  }

  const double sqrt_n1 = std::sqrt(static_cast<double>(n1));
  const double sigma_hat = x_scale * y_scale / sqrt_n1;
  out.tau = spec.nu0 * sqrt_n1 * sigma_hat;
  return out;
}

IndexSet select_fraction_of_max(const Vector& scores, double nu, int mode) {
  IndexSet out;
  out.mode = mode;
  const double peak = scores.size() > 0 ? scores.cwiseAbs().maxCoeff() : 0.0;
  if (peak == 0.0) return out;
  const double cut = nu * peak;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (std::abs(scores[i]) > cut) out.indices.push_back(static_cast<int>(i));
  return out;
}

ActiveSetResult active_set_find(const Tensor3& Yk, const Matrix& Xk, double tau_k, double nu,
                                Rng& rng, const HooiOptions& opts) {
  const int n = Yk.dims().d1;
  if (Xk.rows() != n) throw_shape("active_set_find: sample count mismatch");
  if (!(nu > 0.0 && nu < 1.0)) throw_config("active_set_find: nu must lie in (0, 1)");
  if (tau_k < 0.0) throw_compute("active_set_find: negative tau");

  const SampleSplit split = split_samples(n, rng);
  const int n1 = static_cast<int>(split.omega1.size());

  const Tensor3 S = cov_tensor(select_samples(Yk, split.omega1), select_rows(Xk, split.omega1));
  const Tensor3 Sprime =
      cov_tensor(select_samples(Yk, split.omega2), select_rows(Xk, split.omega2));

  ActiveSetResult out;
  out.applied_threshold = tau_k / std::sqrt(static_cast<double>(n1));
  const Tensor3 eta = soft_threshold(S, out.applied_threshold);

  for (int m = 0; m < 3; ++m) out.sets[static_cast<std::size_t>(m)].mode = m + 1;

  if (max_abs(eta) == 0.0) {
    out.no_signal = true;
    out.scores[0] = Vector::Zero(Xk.cols());
    out.scores[1] = Vector::Zero(Yk.dims().d2);
    out.scores[2] = Vector::Zero(Yk.dims().d3);
    return out;
  }

  out.hooi = hooi_rank1(eta, opts);
  const Vector* q[3] = {&out.hooi.q1, &out.hooi.q2, &out.hooi.q3};
  for (int m = 0; m < 3; ++m) {
    const Vector& qa = *q[(m + 1) % 3];
    const Vector& qb = *q[(m + 2) % 3];
    Vector s = contract_others(Sprime, m + 1, qa, qb);
    out.sets[static_cast<std::size_t>(m)] = select_fraction_of_max(s, nu, m + 1);
    out.scores[static_cast<std::size_t>(m)] = std::move(s);
  }
  return out;
}

Tensor3 deflate_response(const Tensor3& Y, const Matrix& X, const Matrix& Wk) {
  const int n = Y.dims().d1;
  if (X.rows() != n) throw_shape("deflate_response: sample count mismatch");
  if (Wk.rows() != X.cols()) throw_shape("deflate_response: W row count mismatch");
  if (Wk.cols() == 0 || Wk.isZero(0.0)) return Y;
  // Orthogonal projector onto the complement of col(X W); the inner inverse
  // goes through the pseudoinverse so rank-deficient directions are safe.
  const Matrix XW = X * Wk;
  const Matrix proj = Matrix::Identity(n, n) - XW * pinv(XW);
  return mode_multiply(Y, proj, 1);
}

const std::array<IndexSet, 3>& ActiveSets::cumulative() const {
  if (stages.empty()) throw_compute("ActiveSets: no stages recorded");
  return stages.back().cumulative;
}

ShopsModel shops_fit(const Tensor3& Y, const Matrix& X, int K, const ThresholdSpec& spec,
                     const HooiOptions& opts, std::uint64_t seed, const StageObserver& observer) {
  spec.validate();
  const Dims3 yd = Y.dims();
  const int n = yd.d1;
  const int d1 = static_cast<int>(X.cols());
  if (X.rows() != n) throw_shape("shops_fit: sample count mismatch");
  if (K < 1) throw_compute("shops_fit: K must be >= 1");

  Rng rng(seed);
  ShopsModel model;
  model.requested_components = K;
  model.thresholds = spec;
  model.seed = seed;
  model.B = Tensor3(Dims3{d1, yd.d2, yd.d3});
  model.W = Matrix::Zero(d1, 0);

  Tensor3 Yk = Y;
  std::array<IndexSet, 3> cumulative;
  for (int m = 0; m < 3; ++m) cumulative[static_cast<std::size_t>(m)].mode = m + 1;

  for (int k = 1; k <= K; ++k) {
    const TauEstimate tau = estimate_tau(Yk, X, spec, (n + 1) / 2);
    ActiveSetResult found = active_set_find(Yk, X, tau.tau, spec.nu, rng, opts);

    StageSets stage;
    stage.found = found.sets;
    stage.tau = tau.tau;
    stage.no_signal = found.no_signal;
    for (int m = 0; m < 3; ++m)
      cumulative[static_cast<std::size_t>(m)] = set_union(
          cumulative[static_cast<std::size_t>(m)], found.sets[static_cast<std::size_t>(m)]);
    stage.cumulative = cumulative;

    const bool any_empty = cumulative[0].empty() || cumulative[1].empty() || cumulative[2].empty();
    if (any_empty) {
      model.truncated = true;
      model.warning = "empty active set at component " + std::to_string(k);
      break;
    }
    model.sets.stages.push_back(stage);
    model.taus.push_back(tau.tau);

    // Reduced-data refit on the full sample, restricted to the cumulative sets.
    const Tensor3 Yred = extract(Y, std::nullopt, cumulative[1], cumulative[2]);
    const Matrix Xred = select_cols(X, cumulative[0]);
    const int kfit = std::min(k, std::min(n, static_cast<int>(Xred.cols())));
    if (kfit < k) {
      model.truncated = true;
      model.warning = "active set smaller than component count at component " + std::to_string(k);
    }
    HoplsModel reduced = hopls_fit(Yred, Xred, kfit, opts);
    if (reduced.truncated) {
      model.truncated = true;
      model.warning = "reduced fit truncated at component " + std::to_string(k) + ": " +
                      reduced.warning;
    }

    model.B = scatter_back(reduced.B, Dims3{d1, yd.d2, yd.d3}, cumulative[0], cumulative[1],
                           cumulative[2]);
    Matrix W = Matrix::Zero(d1, reduced.W.cols());
    for (int r = 0; r < cumulative[0].size(); ++r)
      W.row(cumulative[0].indices[static_cast<std::size_t>(r)]) = reduced.W.row(r);
    model.W = W;
    model.stage_fits.push_back(std::move(reduced));
    model.components = k;

    if (observer) observer(k, model.B, model.sets);
    if (model.truncated) break;

    if (k < K) Yk = deflate_response(Y, X, model.W);
  }

  if (model.sets.stages.empty()) {
    model.warning = model.warning.empty() ? "no active components found" : model.warning;
  }
  return model;
}

Tensor3 shops_predict(const ShopsModel& model, const Matrix& Xnew) {
  return coeff_predict(model.B, Xnew);
}

}  // namespace tpls
