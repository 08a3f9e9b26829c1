#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpls/simgen.hpp"
#include "tpls/shops.hpp"
#include "tpls/tuning.hpp"

namespace tpls {

// ||Bhat - B||_F.
double estimation_error(const Tensor3& Bhat, const Tensor3& B);

// ||Ynew - Bhat x1 Xnew||_F / sqrt(n) with n = rows of Xnew.
double prediction_error(const Tensor3& Bhat, const Matrix& Xnew, const Tensor3& Ynew);

struct TprFpr {
  double tpr = 0.0;
  double fpr = 0.0;
};

// Set-cardinality rates against a nonempty proper-subset truth.
TprFpr tpr_fpr(const IndexSet& Ahat, const IndexSet& Astar, int d);

enum class FitMethod { shops, hopls, ols };

std::string method_name(FitMethod m);
FitMethod method_from_name(const std::string& name);

struct ReplicateMetrics {
  std::string scenario;
  std::string method;
  int replicate = 0;
  bool ok = false;
  std::string note;  // failure reason or "not applicable"
  double estimation = 0.0;
  double prediction = 0.0;
  double tpr1 = 0.0, fpr1 = 0.0;
  double tpr23 = 0.0, fpr23 = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 when count < 2
};

struct MethodSummary {
  std::string scenario;
  std::string method;
  int replicates = 0;  // successful replicates
  int failures = 0;
  MetricSummary estimation, prediction, tpr1, fpr1, tpr23, fpr23;
};

struct MetricsReport {
  std::vector<ReplicateMetrics> replicates;
  std::vector<MethodSummary> summaries;
};

struct BenchmarkOptions {
  int replicates = 30;
  bool center = true;
  ThresholdSpec spec;        // nu used when use_cv is false
  HooiOptions hooi;
  bool use_cv = false;       // tune (K, nu) per replicate by cross-validation
  CvOptions cv;              // grid and folds for use_cv
  std::string pattern_dir = "data/patterns";
};

// Monte-Carlo comparison of the fitted methods on freshly drawn data. Per
// replicate: a training draw and an independent test draw of the same size,
// one fit per method, then all evaluation criteria. Least squares is skipped
// (recorded "not applicable") when n <= p. Replicate seeds are derived from
// (seed, scenario index, replicate index), so results do not depend on
// execution order.
MetricsReport benchmark(const std::vector<SimScenario>& scenarios,
                        const std::vector<FitMethod>& methods, const BenchmarkOptions& options,
                        std::uint64_t seed);

}  // namespace tpls
