#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "test_util.hpp"
#include "tpls/shops.hpp"
#include "tpls/tensor_ref.hpp"

using namespace tpls;
using namespace tpls::testutil;

TEST_CASE("soft_threshold: zero threshold is the identity") {
  Rng rng(1);
  const Tensor3 S = random_tensor({4, 3, 5}, rng);
  CHECK(soft_threshold(S, 0.0) == S);
}

TEST_CASE("soft_threshold: formula-forced values") {
  Tensor3 S(Dims3{3, 1, 1});
  S.at(0, 0, 0) = 0.5;
  S.at(1, 0, 0) = -0.1;
  S.at(2, 0, 0) = -0.5;
  const Tensor3 out = soft_threshold(S, 0.2);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.3));
  CHECK(out.at(1, 0, 0) == 0.0);
  CHECK(out.at(2, 0, 0) == doctest::Approx(-0.3));
}

TEST_CASE("soft_threshold: contraction property and reference agreement") {
  Rng rng(2);
  const Tensor3 S = random_tensor({6, 5, 4}, rng);
  const double t = 0.7;
  const Tensor3 out = soft_threshold(S, t);
  CHECK(max_abs(subtract(out, S)) <= t + 1e-15);
  CHECK(out == ref::soft_threshold(S, t));
  CHECK_THROWS_AS(soft_threshold(S, -0.1), Error);
}

TEST_CASE("split_samples: sizes, disjointness, determinism") {
  Rng a(3);
  const SampleSplit s4 = split_samples(4, a);
  CHECK(s4.omega1.size() == 2);
  CHECK(s4.omega2.size() == 2);
  std::set<int> all(s4.omega1.begin(), s4.omega1.end());
  all.insert(s4.omega2.begin(), s4.omega2.end());
  CHECK(all == std::set<int>{0, 1, 2, 3});

  Rng b(3);
  const SampleSplit s5 = split_samples(5, b);
  CHECK(s5.omega1.size() == 3);
  CHECK(s5.omega2.size() == 2);

  Rng c1(7), c2(7);
  const SampleSplit r1 = split_samples(100, c1);
  const SampleSplit r2 = split_samples(100, c2);
  CHECK(r1.omega1 == r2.omega1);
  CHECK(r1.omega2 == r2.omega2);

  Rng d(4);
  CHECK_THROWS_AS(split_samples(3, d), Error);
}

TEST_CASE("estimate_tau: zero multiplier, scale homogeneity") {
  Rng rng(5);
  const Tensor3 Y = random_tensor({20, 4, 3}, rng);
  const Matrix X = random_matrix(20, 6, rng);
  ThresholdSpec spec;
  spec.nu0 = 0.0;
  CHECK(estimate_tau(Y, X, spec, 10).tau == 0.0);

  spec.nu0 = 1.6448536269514722;
  const double tau1 = estimate_tau(Y, X, spec, 10).tau;
  Tensor3 Y2 = Y;
  scale_inplace(Y2, 3.0);
  const double tau3 = estimate_tau(Y2, X, spec, 10).tau;
  CHECK(tau3 == doctest::Approx(3.0 * tau1).epsilon(1e-12));
}

TEST_CASE("estimate_tau: standard normal data gives tau near nu0") {
  // With unit-scale X columns and unit-scale response entries, the scale
  // estimate is ~1 and tau/sqrt(n1) ~ nu0/sqrt(n1).
  Rng rng(6);
  const int n = 4000;
  const Tensor3 Y = random_tensor({n, 8, 8}, rng);
  const Matrix X = random_matrix(n, 40, rng);
  ThresholdSpec spec;  // robust (MAD) path
  const int n1 = n / 2;
  const double tau = estimate_tau(Y, X, spec, n1).tau;
  CHECK(tau == doctest::Approx(spec.nu0).epsilon(0.10));

  spec.robust_scale = false;  // standard-deviation path
  const double tau_sd = estimate_tau(Y, X, spec, n1).tau;
  CHECK(tau_sd == doctest::Approx(spec.nu0).epsilon(0.10));
}

TEST_CASE("estimate_tau: constant column falls back to standard deviation") {
  Rng rng(7);
  const Tensor3 Y = random_tensor({20, 3, 3}, rng);
  Matrix X = random_matrix(20, 5, rng);
  X.col(2).setConstant(4.0);  // MAD = 0, sd = 0
  ThresholdSpec spec;
  const TauEstimate est = estimate_tau(Y, X, spec, 10);
  CHECK(est.sd_fallback_columns == 1);
  CHECK(est.tau >= 0.0);
  CHECK(std::isfinite(est.tau));
}

namespace {

Vector sparse_unit(int d, int lo, int len) {
  Vector v = Vector::Zero(d);
  for (int i = lo; i < lo + len; ++i) v[i] = 1.0;
  return v / v.norm();
}

struct PlantedSparse {
  Matrix X;
  Tensor3 B, Y;
  std::array<std::set<int>, 3> support;  // per-mode union supports
};

// Noiseless two-component model with disjoint uniform-magnitude supports and
// a 2:1 weight gap; the covariates have exactly identity sample covariance.
PlantedSparse planted_sparse(int n, int d1, int d2, int d3, Rng& rng) {
  PlantedSparse p;
  p.X = scaled_orthonormal(n, d1, rng);
  const Vector u11 = sparse_unit(d1, 0, 3), u12 = sparse_unit(d1, 3, 3);
  const Vector u21 = sparse_unit(d2, 0, 2), u22 = sparse_unit(d2, 2, 2);
  const Vector u31 = sparse_unit(d3, 0, 2), u32 = sparse_unit(d3, 2, 2);
  Tensor3 B1 = outer3(u11, u21, u31);
  scale_inplace(B1, 4.0);
  Tensor3 B2 = outer3(u12, u22, u32);
  scale_inplace(B2, 2.0);
  p.B = add(B1, B2);
  p.Y = mode_multiply(p.B, p.X, 1);
  p.support[0] = {0, 1, 2, 3, 4, 5};
  p.support[1] = {0, 1, 2, 3};
  p.support[2] = {0, 1, 2, 3};
  return p;
}

std::set<int> as_set(const IndexSet& s) { return {s.indices.begin(), s.indices.end()}; }

}  // namespace

TEST_CASE("active_set_find: planted rank-1 support is recovered exactly") {
  Rng data_rng(8);
  const int n = 200, d1 = 20, d2 = 12, d3 = 10;
  Matrix X = scaled_orthonormal(n, d1, data_rng);
  const Vector u1 = sparse_unit(d1, 2, 4), u2 = sparse_unit(d2, 1, 3), u3 = sparse_unit(d3, 0, 3);
  Tensor3 B = outer3(u1, u2, u3);
  scale_inplace(B, 5.0);
  const Tensor3 Y = mode_multiply(B, X, 1);

  ThresholdSpec spec;
  const double tau = estimate_tau(Y, X, spec, (n + 1) / 2).tau;
  Rng rng(9);
  const ActiveSetResult res = active_set_find(Y, X, tau, 0.5, rng);
  CHECK(!res.no_signal);
  CHECK(as_set(res.sets[0]) == std::set<int>{2, 3, 4, 5});
  CHECK(as_set(res.sets[1]) == std::set<int>{1, 2, 3});
  CHECK(as_set(res.sets[2]) == std::set<int>{0, 1, 2});
}

TEST_CASE("active_set_find: a huge threshold kills everything") {
  Rng data_rng(10);
  const Tensor3 Y = random_tensor({40, 6, 5}, data_rng);
  const Matrix X = random_matrix(40, 8, data_rng);
  Rng rng(11);
  const ActiveSetResult res = active_set_find(Y, X, 1e9, 0.5, rng);
  CHECK(res.no_signal);
  for (const auto& s : res.sets) CHECK(s.empty());
}

TEST_CASE("fraction-of-max selection on an exact rank-1 score tensor") {
  // With S' exactly theta * u1 o u2 o u3 and loadings (q2, q3) aligned, the
  // mode-1 scores are proportional to u1, so selection keeps exactly the
  // entries above nu * max |u1|.
  Vector u1(5);
  u1 << 1.0, 0.6, 0.4, 0.0, -0.7;
  Rng rng(12);
  const Vector u2 = random_unit(4, rng), u3 = random_unit(3, rng);
  Tensor3 Sprime = outer3(u1, u2, u3);
  scale_inplace(Sprime, 2.0);
  const Vector scores = contract_others(Sprime, 1, u2, u3);
  // Analytic contraction: scores = 2 * |u2|^2 |u3|^2 * u1 = 2 * u1.
  CHECK((scores - 2.0 * u1).cwiseAbs().maxCoeff() < 1e-12);
  const IndexSet picked = select_fraction_of_max(scores, 0.5, 1);
  CHECK(as_set(picked) == std::set<int>{0, 1, 4});

  CHECK(select_fraction_of_max(Vector::Zero(5), 0.5, 1).empty());
}

TEST_CASE("deflate_response: zero direction leaves the response unchanged") {
  Rng rng(13);
  const Tensor3 Y = random_tensor({20, 4, 3}, rng);
  const Matrix X = random_matrix(20, 6, rng);
  CHECK(deflate_response(Y, X, Matrix::Zero(6, 2)) == Y);
}

TEST_CASE("deflate_response: full-rank direction projects out the fitted subspace") {
  Rng rng(14);
  const int n = 30, d1 = 5;
  const Matrix X = random_matrix(n, d1, rng);
  const Tensor3 Y = random_tensor({n, 4, 3}, rng);
  const Matrix W = Matrix::Identity(d1, d1);
  const Tensor3 Yd = deflate_response(Y, X, W);
  // Residual orthogonal to the columns of X W.
  const Matrix XW = X * W;
  const Tensor3 leftover = mode_multiply(Yd, Matrix(XW.transpose()), 1);
  CHECK(frobenius_norm(leftover) <= 1e-8 * frobenius_norm(Y) * XW.norm());
  // Projector idempotence: deflating again changes nothing.
  CHECK(rel_diff(deflate_response(Yd, X, W), Yd) < 1e-10);
}

TEST_CASE("shops_fit: thresholds disabled reduces to the dense fit bit-for-bit") {
  Rng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 24, d1 = 7, d2 = 5, d3 = 4, K = 2;
    const Matrix X = random_matrix(n, d1, rng);
    const Tensor3 Y = random_tensor({n, d2, d3}, rng);

    ThresholdSpec spec;
    spec.nu0 = 0.0;    // tau = 0: soft threshold is the identity
    spec.nu = 1e-12;   // fraction-of-max keeps every nonzero score
    const ShopsModel sparse = shops_fit(Y, X, K, spec, {}, 77 + trial);
    const HoplsModel dense = hopls_fit(Y, X, K);

    REQUIRE(sparse.components == K);
    CHECK(sparse.sets.cumulative()[0].size() == d1);
    CHECK(sparse.sets.cumulative()[1].size() == d2);
    CHECK(sparse.sets.cumulative()[2].size() == d3);
    CHECK(sparse.B == dense.B);  // bit-exact
    CHECK((sparse.W - dense.W).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("shops_fit: noiseless planted sparse model is recovered exactly") {
  Rng rng(16);
  const PlantedSparse p = planted_sparse(60, 20, 12, 10, rng);
  ThresholdSpec spec;  // nu = 0.5
  const ShopsModel m = shops_fit(p.Y, p.X, 2, spec, {}, 21);
  REQUIRE(m.components == 2);
  const auto& cum = m.sets.cumulative();
  CHECK(as_set(cum[0]) == p.support[0]);
  CHECK(as_set(cum[1]) == p.support[1]);
  CHECK(as_set(cum[2]) == p.support[2]);
  CHECK(rel_diff(m.B, p.B) <= 1e-3);
}

TEST_CASE("shops_fit: support containment and monotone cumulative sets") {
  Rng rng(17);
  const int n = 60, d1 = 15, d2 = 8, d3 = 8;
  const Matrix X = random_matrix(n, d1, rng);
  Tensor3 Y = random_tensor({n, d2, d3}, rng);
  // Add a sparse signal so something gets selected.
  const Vector u1 = sparse_unit(d1, 0, 4), u2 = sparse_unit(d2, 0, 3), u3 = sparse_unit(d3, 0, 3);
  Tensor3 B = outer3(u1, u2, u3);
  scale_inplace(B, 6.0);
  Y = add(Y, mode_multiply(B, X, 1));

  const ShopsModel m = shops_fit(Y, X, 3, {}, {}, 5);
  REQUIRE(!m.sets.stages.empty());

  for (std::size_t st = 1; st < m.sets.stages.size(); ++st)
    for (int mode = 0; mode < 3; ++mode) {
      const auto& prev = m.sets.stages[st - 1].cumulative[static_cast<std::size_t>(mode)];
      const auto& next = m.sets.stages[st].cumulative[static_cast<std::size_t>(mode)];
      for (int idx : prev.indices) CHECK(next.contains(idx));
    }

  const auto& cum = m.sets.cumulative();
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d3; ++k)
        if (m.B.at(i, j, k) != 0.0) {
          CHECK(cum[0].contains(i));
          CHECK(cum[1].contains(j));
          CHECK(cum[2].contains(k));
        }
}

TEST_CASE("shops_fit: seeded determinism and prediction invariance") {
  Rng rng(18);
  const PlantedSparse p = planted_sparse(60, 20, 12, 10, rng);
  Tensor3 Y = p.Y;
  for (std::int64_t t = 0; t < Y.size(); ++t) Y.data()[t] += 0.5 * rng.gaussian();

  const ShopsModel a = shops_fit(Y, p.X, 2, {}, {}, 99);
  const ShopsModel b = shops_fit(Y, p.X, 2, {}, {}, 99);
  CHECK(a.B == b.B);
  REQUIRE(!a.sets.stages.empty());
  CHECK(a.sets.cumulative()[0].indices == b.sets.cumulative()[0].indices);

  // Perturbing covariate columns outside the mode-1 active set cannot change
  // predictions: those coefficient rows are exactly zero.
  Matrix Xnew = random_matrix(7, 20, rng);
  Matrix Xperturbed = Xnew;
  const auto& active1 = a.sets.cumulative()[0];
  for (int i = 0; i < 20; ++i)
    if (!active1.contains(i)) Xperturbed.col(i).array() += 100.0;
  CHECK(shops_predict(a, Xnew) == shops_predict(a, Xperturbed));

  CHECK(frobenius_norm(shops_predict(a, Matrix::Zero(3, 20))) == 0.0);
}

TEST_CASE("shops_fit: all-noise data with a huge threshold stops early") {
  Rng rng(19);
  const Tensor3 Y = random_tensor({40, 6, 5}, rng);
  const Matrix X = random_matrix(40, 8, rng);
  ThresholdSpec spec;
  spec.nu0 = 1e6;
  const ShopsModel m = shops_fit(Y, X, 3, spec, {}, 3);
  CHECK(m.truncated);
  CHECK(m.components == 0);
  CHECK(frobenius_norm(m.B) == 0.0);
  CHECK(!m.warning.empty());
}
