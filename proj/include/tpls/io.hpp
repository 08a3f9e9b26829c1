#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "tpls/metrics.hpp"

namespace tpls {

using Json = nlohmann::json;

// --- tensor file ---------------------------------------------------------
// Self-describing binary container: a text manifest (magic line plus
// "key: value" lines, terminated by one blank line) followed by the raw
// payload of d1*d2*d3 little-endian IEEE-754 doubles in row-major order with
// the last index fastest. The manifest carries a CRC-32 of the payload.

void write_tensor(const Tensor3& T, const std::string& path);
Tensor3 read_tensor(const std::string& path);

// --- matrix CSV ----------------------------------------------------------
// Headerless numeric CSV: comma separator, '.' decimal point, one row per
// line, 17 significant digits on write (round-trip exact). Scientific
// notation is accepted on read; ragged rows are rejected.

void write_matrix_csv(const Matrix& M, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

// --- model files ---------------------------------------------------------
// JSON documents with binary payloads encoded as base64 little-endian
// doubles, so coefficients round-trip bit-exactly.

void save_hopls_model(const HoplsModel& model, const std::optional<Centering>& centering,
                      std::uint64_t seed, const std::string& path);
void save_shops_model(const ShopsModel& model, const std::optional<Centering>& centering,
                      const std::string& path);
void save_ols_model(const Tensor3& B, const std::optional<Centering>& centering,
                    std::uint64_t seed, const std::string& path);

// What every saved model can do after a reload: predict and report.
struct LoadedModel {
  std::string method;  // shops | hopls | ols
  int components = 0;
  Tensor3 B;
  Matrix W;  // empty for ols
  std::optional<Centering> centering;
  std::array<IndexSet, 3> active;  // cumulative sets; full sets for non-sparse methods
  std::uint64_t seed = 0;

  // B x1 (Xnew - x_mean) + y_mean when centering is present, B x1 Xnew otherwise.
  Tensor3 predict(const Matrix& Xnew) const;
};

LoadedModel load_model(const std::string& path);

// --- index sets ----------------------------------------------------------
// JSON object {"mode1": [...], "mode2": [...], "mode3": [...]} with 1-based
// indices on disk.

void save_active_sets(const std::array<IndexSet, 3>& sets, const std::string& path);
std::array<IndexSet, 3> load_active_sets(const std::string& path);

// --- reports -------------------------------------------------------------

void write_metrics_csv(const MetricsReport& report, const std::string& replicate_path,
                       const std::string& summary_path);
// Plain-text table: one block per scenario, one row per method, mean (sd)
// cells for every evaluation criterion.
std::string format_metrics_table(const MetricsReport& report);

void write_cv_csv(const CvResult& cv, const std::string& path);

// --- config --------------------------------------------------------------

Json load_json_file(const std::string& path);
SimScenario scenario_from_json(const Json& j);

struct BenchmarkConfig {
  std::vector<SimScenario> scenarios;
  std::vector<FitMethod> methods;
  BenchmarkOptions options;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

BenchmarkConfig benchmark_config_from_json(const Json& j);

// --- misc ----------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

std::string format_double(double v);  // shortest exact round-trip form

}  // namespace tpls
