#include "tpls/simgen.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "tpls/decomp.hpp"

namespace tpls {

void SimScenario::validate() const {
  if (n < 4) throw_config("scenario: n must be >= 4");
  if (p < 2 || s < 1 || s >= p) throw_config("scenario: need 1 <= s < p");
  if (K < 2) throw_config("scenario: K must be >= 2");
  if (s % K != 0)
    throw_config("scenario: s = " + std::to_string(s) + " not divisible by K = " + std::to_string(K));
  if (R < 1 || R > K) throw_config("scenario: need 1 <= R <= K");
  if (d2 < 1 || d3 < 1) throw_config("scenario: response dims must be positive");
  if (sigma2 < 0.0 || lambda < 0.0) throw_config("scenario: negative scale parameter");
  if (theta1 <= 0.0) throw_config("scenario: theta1 must be positive");
  const auto& ranks = builtin_pattern_ranks();
  const auto it = ranks.find(pattern);
  if (it != ranks.end() && it->second != R)
    throw_config("scenario: pattern '" + pattern + "' has rank " + std::to_string(it->second) +
                 ", R = " + std::to_string(R));
}

std::string SimScenario::label() const {
  if (!name.empty()) return name;
  return "n" + std::to_string(n) + "_R" + std::to_string(R) + "_s" + std::to_string(s) + "_" +
         pattern;
}

const std::map<std::string, int>& builtin_pattern_ranks() {
  static const std::map<std::string, int> ranks = {
      {"square", 1}, {"cross", 2}, {"circle", 9}, {"bat", 14}};
  return ranks;
}

GammaBasis build_gamma(int p, int s, int K) {
  if (K == 2) throw_config("build_gamma: K = 2 is degenerate (a1 = 0)");
  if (K < 2) throw_config("build_gamma: K must be >= 2");
  if (s % K != 0) throw_config("build_gamma: s must be divisible by K");
  if (s >= p) throw_config("build_gamma: need s < p");

  GammaBasis basis;
  basis.p = p;
  basis.s = s;
  basis.K = K;
  const int b = s / K;  // block length
  basis.a0 = 1.0 / std::sqrt(static_cast<double>(s - b) +
                             static_cast<double>(b) * 0.25 * (K - 2) * (K - 2));
  basis.a1 = 0.5 * (K - 2) * basis.a0;
  basis.a2 = 1.0 / std::sqrt(static_cast<double>(p - s));

  basis.Gamma = Matrix::Zero(p, K + 1);
  for (int j = 0; j < K; ++j) {
    for (int i = 0; i < s; ++i) basis.Gamma(i, j) = -basis.a0;
    for (int i = j * b; i < (j + 1) * b; ++i) basis.Gamma(i, j) = basis.a1;
  }
  for (int i = s; i < p; ++i) basis.Gamma(i, K) = basis.a2;
  return basis;
}

Matrix gen_covariates(const GammaBasis& basis, double lambda, int n, Rng& rng) {
  const int p = basis.p;
  const int l = basis.K + 1;
  Matrix H(n, l);
  for (int j = 0; j < l; ++j)
    for (int i = 0; i < n; ++i) H(i, j) = lambda * rng.gaussian();
  Matrix X = H * basis.Gamma.transpose();
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) += rng.gaussian();
  return X;
}

PatternMask load_pattern_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("pattern mask: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw_io("pattern mask: " + path + " is empty");
  const std::size_t cols = lines.front().size();
  PatternMask mask;
  mask.M = Matrix::Zero(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != cols) throw_io("pattern mask: ragged row in " + path);
    for (std::size_t c = 0; c < cols; ++c) {
      const char ch = lines[r][c];
      if (ch != '0' && ch != '1') throw_io("pattern mask: invalid character in " + path);
      mask.M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = ch == '1' ? 1.0 : 0.0;
    }
  }
  Eigen::BDCSVD<Matrix> svd(mask.M);
  const Vector& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-9 * sv[0]) ++mask.rank;
  return mask;
}

PatternMask load_builtin_pattern(const std::string& name, const std::string& pattern_dir) {
  PatternMask mask = load_pattern_mask(pattern_dir + "/" + name + ".txt");
  mask.name = name;
  return mask;
}

namespace {

// Partition [K] into R contiguous groups, sizes as even as possible.
std::vector<std::pair<int, int>> contiguous_groups(int K, int R) {
  std::vector<std::pair<int, int>> groups;
  int start = 0;
  for (int r = 0; r < R; ++r) {
    const int len = K / R + (r < K % R ? 1 : 0);
    groups.emplace_back(start, start + len);
    start += len;
  }
  return groups;
}

}  // namespace

CoefficientTruth build_pattern_coefficients(const PatternMask& mask, int R, int K,
                                            const GammaBasis& basis, int d2, int d3,
                                            double theta1) {
  if (mask.M.rows() != d2 || mask.M.cols() != d3)
    throw_config("pattern mask is " + std::to_string(mask.M.rows()) + "x" +
                 std::to_string(mask.M.cols()) + ", scenario needs " + std::to_string(d2) + "x" +
                 std::to_string(d3));
  if (mask.rank < R)
    throw_config("pattern mask rank " + std::to_string(mask.rank) + " is below R = " +
                 std::to_string(R));
  if (R > K) throw_config("build_pattern_coefficients: R must not exceed K");

  CoefficientTruth truth;
  Eigen::BDCSVD<Matrix> svd(mask.M, Eigen::ComputeThinU | Eigen::ComputeThinV);

  truth.U2 = Matrix(d2, R);
  truth.U3 = Matrix(d3, R);
  truth.theta.resize(static_cast<std::size_t>(R));
  const double sigma1 = svd.singularValues()[0];
  for (int r = 0; r < R; ++r) {
    Vector u = svd.matrixU().col(r);
    Vector v = svd.matrixV().col(r);
    const double flip = apply_sign_convention(u);
    v *= flip;  // keep u v' invariant
    truth.U2.col(r) = u;
    truth.U3.col(r) = v;
    truth.theta[static_cast<std::size_t>(r)] = theta1 * svd.singularValues()[r] / sigma1;
  }

  // Mode-1 loadings: normalized sums of disjoint contiguous spike groups.
  const auto groups = contiguous_groups(K, R);
  truth.C = Matrix::Zero(K, R);
  truth.U1 = Matrix::Zero(basis.p, R);
  for (int r = 0; r < R; ++r) {
    Vector u = Vector::Zero(basis.p);
    for (int j = groups[static_cast<std::size_t>(r)].first;
         j < groups[static_cast<std::size_t>(r)].second; ++j) {
      truth.C(j, r) = 1.0;
      u += basis.Gamma.col(j);
    }
    u /= u.norm();
    apply_sign_convention(u);
    truth.U1.col(r) = u;
  }

  truth.B = Tensor3(Dims3{basis.p, d2, d3});
  for (int r = 0; r < R; ++r) {
    const Tensor3 term = outer3(truth.U1.col(r), truth.U2.col(r), truth.U3.col(r));
    const double th = truth.theta[static_cast<std::size_t>(r)];
    for (std::int64_t t = 0; t < term.size(); ++t) truth.B.data()[t] += th * term.data()[t];
  }
  return truth;
}

Tensor3 gen_response(const Matrix& X, const Tensor3& B, double sigma2, Rng& rng) {
  if (X.cols() != B.dims().d1) throw_shape("gen_response: X columns must match coefficient mode 1");
  Tensor3 Y = mode_multiply(B, X, 1);
  double* p = Y.data();
  for (std::int64_t t = 0; t < Y.size(); ++t) p[t] += sigma2 * rng.gaussian();
  return Y;
}

IndexSet loading_support(const Matrix& U, int mode) {
  IndexSet set;
  set.mode = mode;
  const double tol = 1e-12 * std::max(1.0, U.size() > 0 ? U.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    if (U.row(i).cwiseAbs().maxCoeff() > tol) set.indices.push_back(static_cast<int>(i));
  return set;
}

GroundTruth generate(const SimScenario& scenario, const std::string& pattern_dir) {
  scenario.validate();
  GroundTruth truth;
  truth.scenario = scenario;
  truth.basis = build_gamma(scenario.p, scenario.s, scenario.K);
  const PatternMask mask = load_builtin_pattern(scenario.pattern, pattern_dir);
  truth.coeff = build_pattern_coefficients(mask, scenario.R, scenario.K, truth.basis, scenario.d2,
                                           scenario.d3, scenario.theta1);
  truth.B = truth.coeff.B;

  Rng rng(derive_seed(scenario.seed, 0x747261696eULL));  // training-draw stream
  generate_xy(truth.basis, truth.B, scenario.lambda, scenario.sigma2, scenario.n, rng, truth.X,
              truth.Y);

  truth.active[0] = IndexSet{1, {}};
  for (int i = 0; i < scenario.s; ++i) truth.active[0].indices.push_back(i);
  truth.active[1] = loading_support(truth.coeff.U2, 2);
  truth.active[2] = loading_support(truth.coeff.U3, 3);
  return truth;
}

void generate_xy(const GammaBasis& basis, const Tensor3& B, double lambda, double sigma2, int n,
                 Rng& rng, Matrix& X_out, Tensor3& Y_out) {
  X_out = gen_covariates(basis, lambda, n, rng);
  Y_out = gen_response(X_out, B, sigma2, rng);
}

}  // namespace tpls
