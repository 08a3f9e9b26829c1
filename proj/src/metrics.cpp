#include "tpls/metrics.hpp"

#include <cmath>

namespace tpls {

double estimation_error(const Tensor3& Bhat, const Tensor3& B) {
  return frobenius_norm(subtract(Bhat, B));
}

double prediction_error(const Tensor3& Bhat, const Matrix& Xnew, const Tensor3& Ynew) {
  if (Xnew.rows() != Ynew.dims().d1) throw_shape("prediction_error: sample count mismatch");
  if (Xnew.rows() == 0) throw_shape("prediction_error: empty test set");
  const Tensor3 fitted = coeff_predict(Bhat, Xnew);
  return frobenius_norm(subtract(Ynew, fitted)) / std::sqrt(static_cast<double>(Xnew.rows()));
}

TprFpr tpr_fpr(const IndexSet& Ahat, const IndexSet& Astar, int d) {
  if (Astar.empty()) throw_compute("tpr_fpr: empty truth set");
  if (Astar.size() >= d) throw_compute("tpr_fpr: truth set covers the whole mode");
  Astar.validate(d);
  Ahat.validate(d);
  int hits = 0;
  for (int i : Ahat.indices)
    if (Astar.contains(i)) ++hits;
  TprFpr out;
  out.tpr = static_cast<double>(hits) / Astar.size();
  out.fpr = static_cast<double>(Ahat.size() - hits) / (d - Astar.size());
  return out;
}

std::string method_name(FitMethod m) {
  switch (m) {
    case FitMethod::shops: return "shops";
    case FitMethod::hopls: return "hopls";
    case FitMethod::ols: return "ols";
  }
  return "unknown";
}

FitMethod method_from_name(const std::string& name) {
  if (name == "shops") return FitMethod::shops;
  if (name == "hopls") return FitMethod::hopls;
  if (name == "ols") return FitMethod::ols;
  throw_config("unknown method '" + name + "' (expected shops|hopls|ols)");
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct FitOutput {
  Tensor3 B;
  std::array<IndexSet, 3> active;  // full sets for the non-sparse methods
};

FitOutput run_method(FitMethod method, const GroundTruth& truth, const BenchmarkOptions& options,
                     std::uint64_t fit_seed) {
  const SimScenario& sc = truth.scenario;
  Matrix X = truth.X;
  Tensor3 Y = truth.Y;
  Centering centering;
  if (options.center) {
    centering = Centering::fit(Y, X);
    X = centering.center_x(X);
    Y = centering.center_y(Y);
  }

  FitOutput out;
  out.active[0] = IndexSet::full(1, sc.p);
  out.active[1] = IndexSet::full(2, sc.d2);
  out.active[2] = IndexSet::full(3, sc.d3);

  switch (method) {
    case FitMethod::hopls: {
      const HoplsModel m = hopls_fit(Y, X, sc.K, options.hooi);
      out.B = m.B;
      break;
    }
    case FitMethod::ols: {
      if (sc.n <= sc.p) throw_compute("not applicable: n <= p");
      out.B = ols_fit(Y, X);
      break;
    }
    case FitMethod::shops: {
      ThresholdSpec spec = options.spec;
      int K = sc.K;
      if (options.use_cv) {
        CvOptions cv = options.cv;
        cv.spec = options.spec;
        cv.hooi = options.hooi;
        cv.center = false;  // data already centered here
        const int K_max = elbow_K(X);
        const CvResult chosen =
            cross_validate(Y, X, K_max, cv, derive_seed(fit_seed, 0x6376ULL));
        spec.nu = chosen.chosen_nu;
        K = chosen.chosen_K;
      }
      const ShopsModel m = shops_fit(Y, X, K, spec, options.hooi, fit_seed);
      out.B = m.B;
      if (!m.sets.stages.empty()) out.active = m.sets.cumulative();
      else {
        out.active[0] = IndexSet{1, {}};
        out.active[1] = IndexSet{2, {}};
        out.active[2] = IndexSet{3, {}};
      }
      break;
    }
  }
  return out;
}

}  // namespace

MetricsReport benchmark(const std::vector<SimScenario>& scenarios,
                        const std::vector<FitMethod>& methods, const BenchmarkOptions& options,
                        std::uint64_t seed) {
  if (options.replicates < 1) throw_config("benchmark: replicates must be >= 1");
  MetricsReport report;

  for (std::size_t si = 0; si < scenarios.size(); ++si) {
    const SimScenario& base = scenarios[si];
    base.validate();

    const int reps = options.replicates;
    std::vector<std::vector<ReplicateMetrics>> rows(
        static_cast<std::size_t>(reps),
        std::vector<ReplicateMetrics>(methods.size()));

#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < reps; ++rep) {
      SimScenario sc = base;
      sc.seed = derive_seed(seed, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(rep));
      const GroundTruth truth = generate(sc, options.pattern_dir);

      // Independent test draw of the same size from the same truth.
      Rng test_rng(derive_seed(sc.seed, 0x74657374ULL));
      Matrix X_test;
      Tensor3 Y_test;
      generate_xy(truth.basis, truth.B, sc.lambda, sc.sigma2, sc.n, test_rng, X_test, Y_test);

      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        ReplicateMetrics row;
        row.scenario = base.label();
        row.method = method_name(methods[mi]);
        row.replicate = rep;
        try {
          const std::uint64_t fit_seed = derive_seed(sc.seed, 0x666974ULL, static_cast<std::uint64_t>(mi));
          const FitOutput fit = run_method(methods[mi], truth, options, fit_seed);
          row.estimation = estimation_error(fit.B, truth.B);
          row.prediction = prediction_error(fit.B, X_test, Y_test);
          const TprFpr m1 = tpr_fpr(fit.active[0], truth.active[0], sc.p);
          const TprFpr m2 = tpr_fpr(fit.active[1], truth.active[1], sc.d2);
          const TprFpr m3 = tpr_fpr(fit.active[2], truth.active[2], sc.d3);
          row.tpr1 = m1.tpr;
          row.fpr1 = m1.fpr;
          row.tpr23 = 0.5 * (m2.tpr + m3.tpr);
          row.fpr23 = 0.5 * (m2.fpr + m3.fpr);
          row.ok = true;
        } catch (const std::exception& e) {
          row.ok = false;
          row.note = e.what();
        }
        rows[static_cast<std::size_t>(rep)][mi] = std::move(row);
      }
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      MethodSummary summary;
      summary.scenario = base.label();
      summary.method = method_name(methods[mi]);
      std::vector<double> est, pred, tpr1, fpr1, tpr23, fpr23;
      for (int rep = 0; rep < reps; ++rep) {
        const ReplicateMetrics& row = rows[static_cast<std::size_t>(rep)][mi];
        report.replicates.push_back(row);
        if (!row.ok) {
          ++summary.failures;
          continue;
        }
        ++summary.replicates;
        est.push_back(row.estimation);
        pred.push_back(row.prediction);
        tpr1.push_back(row.tpr1);
        fpr1.push_back(row.fpr1);
        tpr23.push_back(row.tpr23);
        fpr23.push_back(row.fpr23);
      }
      summary.estimation = summarize(est);
      summary.prediction = summarize(pred);
      summary.tpr1 = summarize(tpr1);
      summary.fpr1 = summarize(fpr1);
      summary.tpr23 = summarize(tpr23);
      summary.fpr23 = summarize(fpr23);
      report.summaries.push_back(summary);
    }
  }
  return report;
}

}  // namespace tpls
