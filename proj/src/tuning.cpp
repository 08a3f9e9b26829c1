#include "tpls/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpls/decomp.hpp"

namespace tpls {

int elbow_index(std::span<const double> eigenvalues_desc) {
  const std::size_t n = eigenvalues_desc.size();
  if (n < 3) return 1;
  int best_k = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double curvature =
        eigenvalues_desc[k] - 2.0 * eigenvalues_desc[k + 1] + eigenvalues_desc[k + 2];
    if (curvature > best) {
      best = curvature;
      best_k = static_cast<int>(k) + 1;
    }
  }
  return best_k;
}

int elbow_K(const Matrix& X) {
  const int n = static_cast<int>(X.rows());
  const int d1 = static_cast<int>(X.cols());
  if (n < 2) throw_compute("elbow_K: need at least 2 samples");
  const Matrix S_X = X.transpose() * X / static_cast<double>(n);
  const EigenDesc ed = sym_eigen_desc(S_X);
  std::vector<double> lam(ed.eigenvalues.data(), ed.eigenvalues.data() + ed.eigenvalues.size());
  const int upper = std::max(1, std::min(n, d1) - 1);
  return std::clamp(elbow_index(lam), 1, upper);
}

const CvCell& CvResult::cell(int k, int nu_index) const {
  return table.at(static_cast<std::size_t>(k - 1)).at(static_cast<std::size_t>(nu_index));
}

namespace {

// Fold ids 0..folds-1 assigned to a random permutation of samples; sizes
// differ by at most one.
std::vector<int> assign_folds(int n, int folds, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % folds;
  return fold_of;
}

struct FoldData {
  Tensor3 Y_train, Y_val;
  Matrix X_train, X_val;
};

FoldData split_fold(const Tensor3& Y, const Matrix& X, const std::vector<int>& fold_of, int fold) {
  std::vector<int> train, val;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i)
    (fold_of[static_cast<std::size_t>(i)] == fold ? val : train).push_back(i);
  const Dims3 d = Y.dims();
  FoldData out;
  out.Y_train = Tensor3(Dims3{static_cast<int>(train.size()), d.d2, d.d3});
  out.Y_val = Tensor3(Dims3{static_cast<int>(val.size()), d.d2, d.d3});
  out.X_train = Matrix(static_cast<Eigen::Index>(train.size()), X.cols());
  out.X_val = Matrix(static_cast<Eigen::Index>(val.size()), X.cols());
  const std::int64_t sl = static_cast<std::int64_t>(d.d2) * d.d3;
  for (std::size_t i = 0; i < train.size(); ++i) {
    std::copy_n(Y.slice(train[i]), sl, out.Y_train.slice(static_cast<int>(i)));
    out.X_train.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
  }
  for (std::size_t i = 0; i < val.size(); ++i) {
    std::copy_n(Y.slice(val[i]), sl, out.Y_val.slice(static_cast<int>(i)));
    out.X_val.row(static_cast<Eigen::Index>(i)) = X.row(val[i]);
  }
  return out;
}

}  // namespace

CvResult cross_validate(const Tensor3& Y, const Matrix& X, int K_max, const CvOptions& options,
                        std::uint64_t seed) {
  const int n = Y.dims().d1;
  if (X.rows() != n) throw_shape("cross_validate: sample count mismatch");
  if (options.folds < 2) throw_config("cross_validate: need at least 2 folds");
  if (K_max < 1) throw_config("cross_validate: K_max must be >= 1");
  if (options.nu_grid.empty()) throw_config("cross_validate: empty nu grid");
  for (double nu : options.nu_grid)
    if (!(nu > 0.0 && nu < 1.0)) throw_config("cross_validate: nu grid values must lie in (0, 1)");

  CvResult result;
  result.K_max = K_max;
  result.nu_grid = options.nu_grid;
  result.seed = seed;

  Rng fold_rng(derive_seed(seed, 0x666f6c64ULL));  // fold-assignment stream
  result.fold_of = assign_folds(n, options.folds, fold_rng);

  const int n_nu = static_cast<int>(options.nu_grid.size());
  // err[k-1][nu][fold], NaN when the fold never reached component k.
  std::vector<std::vector<std::vector<double>>> err(
      static_cast<std::size_t>(K_max),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n_nu),
                                       std::vector<double>(static_cast<std::size_t>(options.folds),
                                                           std::numeric_limits<double>::quiet_NaN())));
  int fit_count = 0;
  bool any_truncated = false;

#pragma omp parallel for collapse(2) schedule(dynamic) reduction(+ : fit_count) reduction(|| : any_truncated)
  for (int fold = 0; fold < options.folds; ++fold) {
    for (int nu_idx = 0; nu_idx < n_nu; ++nu_idx) {
      FoldData data = split_fold(Y, X, result.fold_of, fold);
      Centering centering;
      if (options.center) {
        centering = Centering::fit(data.Y_train, data.X_train);
        data.Y_train = centering.center_y(data.Y_train);
        data.X_train = centering.center_x(data.X_train);
        data.Y_val = centering.center_y(data.Y_val);
        data.X_val = centering.center_x(data.X_val);
      }
      ThresholdSpec spec = options.spec;
      spec.nu = options.nu_grid[static_cast<std::size_t>(nu_idx)];
      const std::uint64_t cell_seed =
          derive_seed(seed, 1 + static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(nu_idx));

      const double inv_sqrt_nval = 1.0 / std::sqrt(static_cast<double>(data.Y_val.dims().d1));
      const auto observer = [&](int k, const Tensor3& Bk, const ActiveSets&) {
        const Tensor3 fitted = coeff_predict(Bk, data.X_val);
        err[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(nu_idx)]
           [static_cast<std::size_t>(fold)] =
               frobenius_norm(subtract(data.Y_val, fitted)) * inv_sqrt_nval;
      };
      const ShopsModel m = shops_fit(data.Y_train, data.X_train, K_max, spec, options.hooi,
                                     cell_seed, observer);
      fit_count += 1;
      any_truncated = any_truncated || m.truncated || m.components < K_max;
    }
  }
  result.fit_count = fit_count;
  result.any_truncated = any_truncated;

  result.table.assign(static_cast<std::size_t>(K_max),
                      std::vector<CvCell>(static_cast<std::size_t>(n_nu)));
  for (int k = 0; k < K_max; ++k) {
    for (int nu_idx = 0; nu_idx < n_nu; ++nu_idx) {
      CvCell& cell = result.table[static_cast<std::size_t>(k)][static_cast<std::size_t>(nu_idx)];
      double sum = 0.0;
      int count = 0;
      for (int fold = 0; fold < options.folds; ++fold) {
        const double e = err[static_cast<std::size_t>(k)][static_cast<std::size_t>(nu_idx)]
                            [static_cast<std::size_t>(fold)];
        if (!std::isnan(e)) {
          sum += e;
          ++count;
        }
      }
      cell.count = count;
      cell.mean = count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
      if (count > 1) {
        double ss = 0.0;
        for (int fold = 0; fold < options.folds; ++fold) {
          const double e = err[static_cast<std::size_t>(k)][static_cast<std::size_t>(nu_idx)]
                              [static_cast<std::size_t>(fold)];
          if (!std::isnan(e)) ss += (e - cell.mean) * (e - cell.mean);
        }
        cell.se = std::sqrt(ss / (count - 1)) / std::sqrt(static_cast<double>(count));
      }
    }
  }

  // Argmin of the mean; ties toward smaller K, then smaller nu.
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= K_max; ++k) {
    for (int nu_idx = 0; nu_idx < n_nu; ++nu_idx) {
      const CvCell& cell = result.cell(k, nu_idx);
      if (cell.count == 0 || std::isnan(cell.mean)) continue;
      if (cell.mean < best) {
        best = cell.mean;
        result.chosen_K = k;
        result.chosen_nu = result.nu_grid[static_cast<std::size_t>(nu_idx)];
      }
    }
  }
  if (result.chosen_K == 0) throw_compute("cross_validate: no grid cell produced a fit");
  return result;
}

}  // namespace tpls
