#include "tpls/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace tpls {

namespace {

constexpr const char* kTensorMagic = "TPLS-TENSOR 1";

std::uint32_t payload_crc(const unsigned char* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes 32-bit chunks; desk-scale payloads fit in one call.
  crc = crc32(crc, data, static_cast<uInt>(len));
  return static_cast<std::uint32_t>(crc);
}

void encode_doubles_le(const double* src, std::size_t count, std::vector<unsigned char>& out) {
  out.resize(count * 8);
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(src[t]);
    for (int b = 0; b < 8; ++b) out[t * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
  }
}

void decode_doubles_le(const std::vector<unsigned char>& in, double* dst, std::size_t count) {
  for (std::size_t t = 0; t < count; ++t) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(in[t * 8 + b]) << (8 * b);
    dst[t] = std::bit_cast<double>(bits);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_tensor(const Tensor3& T, const std::string& path) {
  std::vector<unsigned char> payload;
  encode_doubles_le(T.data(), static_cast<std::size_t>(T.size()), payload);
  const std::uint32_t crc = payload_crc(payload.data(), payload.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("write_tensor: cannot open " + path);
  out << kTensorMagic << "\n";
  out << "dims: " << T.dims().d1 << " " << T.dims().d2 << " " << T.dims().d3 << "\n";
  out << "dtype: f64\n";
  out << "layout: row-major\n";
  out << "byteorder: little\n";
  out << "payload: " << payload.size() << "\n";
  char crcbuf[16];
  std::snprintf(crcbuf, sizeof(crcbuf), "%08x", crc);
  out << "checksum: crc32 " << crcbuf << "\n";
  out << "\n";
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw_io("write_tensor: write failed on " + path);
}

Tensor3 read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("read_tensor: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTensorMagic)
    throw_io("read_tensor: " + path + " is not a tensor file (bad magic)");

  Dims3 dims;
  bool have_dims = false;
  std::size_t payload_len = 0;
  bool have_payload = false;
  std::uint32_t crc_expected = 0;
  bool have_crc = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;  // manifest terminator
    const auto sep = line.find(": ");
    if (sep == std::string::npos) throw_io("read_tensor: malformed manifest line '" + line + "'");
    const std::string key = line.substr(0, sep);
    const std::string value = line.substr(sep + 2);
    if (key == "dims") {
      if (std::sscanf(value.c_str(), "%d %d %d", &dims.d1, &dims.d2, &dims.d3) != 3)
        throw_io("read_tensor: bad dims line");
      have_dims = true;
    } else if (key == "dtype") {
      if (value != "f64") throw_io("read_tensor: unsupported dtype " + value);
    } else if (key == "layout") {
      if (value != "row-major") throw_io("read_tensor: unsupported layout " + value);
    } else if (key == "byteorder") {
      if (value != "little") throw_io("read_tensor: unsupported byte order " + value);
    } else if (key == "payload") {
      payload_len = std::stoull(value);
      have_payload = true;
    } else if (key == "checksum") {
      unsigned int crc = 0;
      if (std::sscanf(value.c_str(), "crc32 %8x", &crc) != 1)
        throw_io("read_tensor: bad checksum line");
      crc_expected = crc;
      have_crc = true;
    }
  }
  if (!have_dims || !have_payload || !have_crc)
    throw_io("read_tensor: incomplete manifest in " + path);
  if (dims.d1 < 0 || dims.d2 < 0 || dims.d3 < 0 ||
      payload_len != static_cast<std::size_t>(dims.count()) * 8)
    throw_io("read_tensor: payload length " + std::to_string(payload_len) +
             " does not match dims " + dims.str());

  std::vector<unsigned char> payload(payload_len);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload_len));
  if (static_cast<std::size_t>(in.gcount()) != payload_len)
    throw_io("read_tensor: truncated payload in " + path);
  if (payload_crc(payload.data(), payload.size()) != crc_expected)
    throw_io("read_tensor: checksum mismatch in " + path);

  Tensor3 T(dims);
  decode_doubles_le(payload, T.data(), static_cast<std::size_t>(T.size()));
  return T;
}

void write_matrix_csv(const Matrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("write_matrix_csv: cannot open " + path);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) throw_io("write_matrix_csv: write failed on " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("read_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw_io("read_matrix_csv: invalid number in " + path);
      row.push_back(v);
      p = end;
      while (*p == ' ') ++p;
      if (*p == ',') {
        ++p;
        continue;
      }
      if (*p == '\0') break;
      throw_io("read_matrix_csv: unexpected character '" + std::string(1, *p) + "' in " + path);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw_io("read_matrix_csv: ragged row in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw_io("read_matrix_csv: " + path + " is empty");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

// --- base64 ---------------------------------------------------------------

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const unsigned b0 = data[i];
    const unsigned b1 = i + 1 < len ? data[i + 1] : 0;
    const unsigned b2 = i + 2 < len ? data[i + 2] : 0;
    out.push_back(kB64[b0 >> 2]);
    out.push_back(kB64[((b0 & 0x3) << 4) | (b1 >> 4)]);
    out.push_back(i + 1 < len ? kB64[((b1 & 0xf) << 2) | (b2 >> 6)] : '=');
    out.push_back(i + 2 < len ? kB64[b2 & 0x3f] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  int acc = 0, bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = value_of(c);
    if (v < 0) throw_io("base64: invalid character");
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// --- model files ----------------------------------------------------------

namespace {

constexpr int kModelVersion = 1;

Json tensor_to_json(const Tensor3& T) {
  std::vector<unsigned char> payload;
  encode_doubles_le(T.data(), static_cast<std::size_t>(T.size()), payload);
  return Json{{"dims", {T.dims().d1, T.dims().d2, T.dims().d3}},
              {"data_b64", base64_encode(payload.data(), payload.size())}};
}

Tensor3 tensor_from_json(const Json& j) {
  const auto dims = j.at("dims");
  Dims3 d{dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
  const std::vector<unsigned char> payload = base64_decode(j.at("data_b64").get<std::string>());
  if (payload.size() != static_cast<std::size_t>(d.count()) * 8)
    throw_io("model: tensor payload size mismatch");
  Tensor3 T(d);
  decode_doubles_le(payload, T.data(), static_cast<std::size_t>(T.size()));
  return T;
}

Json matrix_to_json(const Matrix& M) {
  std::vector<unsigned char> payload;
  std::vector<double> col_major(static_cast<std::size_t>(M.size()));
  Eigen::Map<Matrix>(col_major.data(), M.rows(), M.cols()) = M;
  encode_doubles_le(col_major.data(), col_major.size(), payload);
  return Json{{"rows", M.rows()},
              {"cols", M.cols()},
              {"data_b64", base64_encode(payload.data(), payload.size())}};
}

Matrix matrix_from_json(const Json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const std::vector<unsigned char> payload = base64_decode(j.at("data_b64").get<std::string>());
  if (payload.size() != static_cast<std::size_t>(rows * cols) * 8)
    throw_io("model: matrix payload size mismatch");
  Matrix M(rows, cols);
  std::vector<double> col_major(static_cast<std::size_t>(rows * cols));
  decode_doubles_le(payload, col_major.data(), col_major.size());
  Eigen::Map<const Matrix> map(col_major.data(), rows, cols);
  M = map;
  return M;
}

Json index_set_to_json(const IndexSet& s) {
  Json arr = Json::array();
  for (int i : s.indices) arr.push_back(i + 1);  // 1-based on disk
  return arr;
}

IndexSet index_set_from_json(const Json& arr, int mode) {
  IndexSet s;
  s.mode = mode;
  for (const auto& v : arr) s.indices.push_back(v.get<int>() - 1);
  return s;
}

Json centering_to_json(const Centering& c) {
  Matrix xm(1, c.x_mean.cols());
  xm.row(0) = c.x_mean;
  return Json{{"x_mean", matrix_to_json(xm)}, {"y_mean", matrix_to_json(c.y_mean)}};
}

Centering centering_from_json(const Json& j) {
  Centering c;
  const Matrix xm = matrix_from_json(j.at("x_mean"));
  c.x_mean = xm.row(0);
  c.y_mean = matrix_from_json(j.at("y_mean"));
  return c;
}

void write_model_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("save model: cannot open " + path);
  out << j.dump(1) << "\n";
  if (!out) throw_io("save model: write failed on " + path);
}

Json model_header(const std::string& method, std::uint64_t seed) {
  return Json{{"format", "tpls-model"}, {"version", kModelVersion}, {"method", method},
              {"seed", seed}};
}

}  // namespace

void save_hopls_model(const HoplsModel& model, const std::optional<Centering>& centering,
                      std::uint64_t seed, const std::string& path) {
  Json j = model_header("hopls", seed);
  j["components"] = model.components;
  j["requested_components"] = model.requested_components;
  j["B"] = tensor_to_json(model.B);
  j["W"] = matrix_to_json(model.W);
  j["G"] = model.G;
  j["truncated"] = model.truncated;
  if (!model.warning.empty()) j["warning"] = model.warning;
  if (centering) j["centering"] = centering_to_json(*centering);
  write_model_json(j, path);
}

void save_shops_model(const ShopsModel& model, const std::optional<Centering>& centering,
                      const std::string& path) {
  Json j = model_header("shops", model.seed);
  j["components"] = model.components;
  j["requested_components"] = model.requested_components;
  j["B"] = tensor_to_json(model.B);
  j["W"] = matrix_to_json(model.W);
  j["nu"] = model.thresholds.nu;
  j["nu0"] = model.thresholds.nu0;
  j["robust_scale"] = model.thresholds.robust_scale;
  j["tau"] = model.taus;
  j["truncated"] = model.truncated;
  if (!model.warning.empty()) j["warning"] = model.warning;
  if (!model.sets.stages.empty()) {
    const auto& cum = model.sets.cumulative();
    j["active_sets"] = Json{{"mode1", index_set_to_json(cum[0])},
                            {"mode2", index_set_to_json(cum[1])},
                            {"mode3", index_set_to_json(cum[2])}};
    Json stages = Json::array();
    for (const auto& st : model.sets.stages)
      stages.push_back(Json{{"mode1", index_set_to_json(st.found[0])},
                            {"mode2", index_set_to_json(st.found[1])},
                            {"mode3", index_set_to_json(st.found[2])},
                            {"tau", st.tau},
                            {"no_signal", st.no_signal}});
    j["stage_sets"] = stages;
  }
  if (centering) j["centering"] = centering_to_json(*centering);
  write_model_json(j, path);
}

void save_ols_model(const Tensor3& B, const std::optional<Centering>& centering,
                    std::uint64_t seed, const std::string& path) {
  Json j = model_header("ols", seed);
  j["components"] = 0;
  j["B"] = tensor_to_json(B);
  if (centering) j["centering"] = centering_to_json(*centering);
  write_model_json(j, path);
}

Tensor3 LoadedModel::predict(const Matrix& Xnew) const {
  if (!centering) return coeff_predict(B, Xnew);
  return centering->uncenter_y(coeff_predict(B, centering->center_x(Xnew)));
}

LoadedModel load_model(const std::string& path) {
  const Json j = load_json_file(path);
  if (!j.contains("format") || j.at("format").get<std::string>() != "tpls-model")
    throw_io("load_model: " + path + " is not a model file");
  if (j.at("version").get<int>() != kModelVersion)
    throw_io("load_model: unsupported model version in " + path);

  LoadedModel m;
  m.method = j.at("method").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.components = j.value("components", 0);
  m.B = tensor_from_json(j.at("B"));
  if (j.contains("W")) m.W = matrix_from_json(j.at("W"));
  if (j.contains("centering")) m.centering = centering_from_json(j.at("centering"));

  const Dims3 d = m.B.dims();
  m.active[0] = IndexSet::full(1, d.d1);
  m.active[1] = IndexSet::full(2, d.d2);
  m.active[2] = IndexSet::full(3, d.d3);
  if (j.contains("active_sets")) {
    const Json& a = j.at("active_sets");
    m.active[0] = index_set_from_json(a.at("mode1"), 1);
    m.active[1] = index_set_from_json(a.at("mode2"), 2);
    m.active[2] = index_set_from_json(a.at("mode3"), 3);
  }
  return m;
}

void save_active_sets(const std::array<IndexSet, 3>& sets, const std::string& path) {
  Json j{{"mode1", index_set_to_json(sets[0])},
         {"mode2", index_set_to_json(sets[1])},
         {"mode3", index_set_to_json(sets[2])}};
  write_text_file(path, j.dump(1) + "\n");
}

std::array<IndexSet, 3> load_active_sets(const std::string& path) {
  const Json j = load_json_file(path);
  return {index_set_from_json(j.at("mode1"), 1), index_set_from_json(j.at("mode2"), 2),
          index_set_from_json(j.at("mode3"), 3)};
}

// --- reports ----------------------------------------------------------------

void write_metrics_csv(const MetricsReport& report, const std::string& replicate_path,
                       const std::string& summary_path) {
  {
    std::ofstream out(replicate_path);
    if (!out) throw_io("write_metrics_csv: cannot open " + replicate_path);
    out << "scenario,method,replicate,ok,estimation_error,prediction_error,"
           "tpr1,fpr1,tpr23,fpr23,note\n";
    for (const auto& r : report.replicates) {
      out << r.scenario << ',' << r.method << ',' << r.replicate << ',' << (r.ok ? 1 : 0) << ',';
      if (r.ok)
        out << format_double(r.estimation) << ',' << format_double(r.prediction) << ','
            << format_double(r.tpr1) << ',' << format_double(r.fpr1) << ','
            << format_double(r.tpr23) << ',' << format_double(r.fpr23);
      else
        out << ",,,,,";
      out << ',' << r.note << '\n';
    }
  }
  std::ofstream out(summary_path);
  if (!out) throw_io("write_metrics_csv: cannot open " + summary_path);
  out << "scenario,method,replicates,failures,"
         "estimation_mean,estimation_sd,prediction_mean,prediction_sd,"
         "tpr1_mean,tpr1_sd,fpr1_mean,fpr1_sd,tpr23_mean,tpr23_sd,fpr23_mean,fpr23_sd\n";
  for (const auto& s : report.summaries) {
    out << s.scenario << ',' << s.method << ',' << s.replicates << ',' << s.failures << ','
        << format_double(s.estimation.mean) << ',' << format_double(s.estimation.sd) << ','
        << format_double(s.prediction.mean) << ',' << format_double(s.prediction.sd) << ','
        << format_double(s.tpr1.mean) << ',' << format_double(s.tpr1.sd) << ','
        << format_double(s.fpr1.mean) << ',' << format_double(s.fpr1.sd) << ','
        << format_double(s.tpr23.mean) << ',' << format_double(s.tpr23.sd) << ','
        << format_double(s.fpr23.mean) << ',' << format_double(s.fpr23.sd) << '\n';
  }
}

namespace {

std::string mean_sd_cell(const MetricSummary& s, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", s.mean, s.sd);
  std::string cell(buf);
  if (static_cast<int>(cell.size()) < width) cell.append(static_cast<std::size_t>(width) - cell.size(), ' ');
  return cell;
}

}  // namespace

std::string format_metrics_table(const MetricsReport& report) {
  std::ostringstream out;
  std::string current;
  const int w = 17;
  for (const auto& s : report.summaries) {
    if (s.scenario != current) {
      current = s.scenario;
      out << "\n== " << current << " ==\n";
      out << "method   " << "Estimation error  " << "Prediction error  "
          << "TPR_1             " << "TPR_23            " << "FPR_1             "
          << "FPR_23\n";
    }
    out << s.method;
    out << std::string(s.method.size() < 9 ? 9 - s.method.size() : 1, ' ');
    if (s.replicates == 0) {
      out << "n/a (" << (s.failures > 0 ? "not applicable or failed" : "no replicates") << ")\n";
      continue;
    }
    out << mean_sd_cell(s.estimation, w) << " " << mean_sd_cell(s.prediction, w) << " "
        << mean_sd_cell(s.tpr1, w) << " " << mean_sd_cell(s.tpr23, w) << " "
        << mean_sd_cell(s.fpr1, w) << " " << mean_sd_cell(s.fpr23, w) << "\n";
  }
  return out.str();
}

void write_cv_csv(const CvResult& cv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("write_cv_csv: cannot open " + path);
  out << "K,nu,mean_cv_error,se,folds\n";
  for (int k = 1; k <= cv.K_max; ++k)
    for (std::size_t nu_idx = 0; nu_idx < cv.nu_grid.size(); ++nu_idx) {
      const CvCell& cell = cv.cell(k, static_cast<int>(nu_idx));
      out << k << ',' << format_double(cv.nu_grid[nu_idx]) << ',' << format_double(cell.mean)
          << ',' << format_double(cell.se) << ',' << cell.count << '\n';
    }
}

// --- config -----------------------------------------------------------------

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw_config("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

SimScenario scenario_from_json(const Json& j) {
  SimScenario sc;
  try {
    sc.n = j.at("n").get<int>();
    sc.p = j.value("p", sc.p);
    sc.s = j.at("s").get<int>();
    sc.K = j.at("K").get<int>();
    sc.R = j.at("R").get<int>();
    sc.lambda = j.value("lambda", sc.lambda);
    sc.sigma2 = j.value("sigma2", sc.sigma2);
    sc.theta1 = j.value("theta1", sc.theta1);
    sc.d2 = j.value("d2", sc.d2);
    sc.d3 = j.value("d3", sc.d3);
    sc.pattern = j.value("pattern", sc.pattern);
    sc.seed = j.value("seed", sc.seed);
    sc.name = j.value("name", std::string());
  } catch (const Json::exception& e) {
    throw_config(std::string("scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

BenchmarkConfig benchmark_config_from_json(const Json& j) {
  BenchmarkConfig cfg;
  try {
    if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty())
      throw_config("benchmark config: 'scenarios' must be a non-empty array");
    for (const auto& sj : j.at("scenarios")) cfg.scenarios.push_back(scenario_from_json(sj));
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
      throw_config("benchmark config: 'methods' must be a non-empty array");
    for (const auto& mj : j.at("methods"))
      cfg.methods.push_back(method_from_name(mj.get<std::string>()));
    cfg.options.replicates = j.value("replicates", cfg.options.replicates);
    cfg.options.center = j.value("center", cfg.options.center);
    cfg.options.use_cv = j.value("use_cv", cfg.options.use_cv);
    cfg.options.pattern_dir = j.value("pattern_dir", cfg.options.pattern_dir);
    if (j.contains("shops")) {
      const Json& s = j.at("shops");
      cfg.options.spec.nu = s.value("nu", cfg.options.spec.nu);
      cfg.options.spec.nu0 = s.value("nu0", cfg.options.spec.nu0);
      cfg.options.spec.robust_scale = s.value("robust_scale", cfg.options.spec.robust_scale);
    }
    if (j.contains("hooi")) {
      const Json& h = j.at("hooi");
      cfg.options.hooi.max_iterations = h.value("max_iterations", cfg.options.hooi.max_iterations);
      cfg.options.hooi.tolerance = h.value("tolerance", cfg.options.hooi.tolerance);
      const std::string init = h.value("init", std::string("hosvd"));
      if (init == "hosvd")
        cfg.options.hooi.init = HooiOptions::Init::hosvd;
      else if (init == "ones")
        cfg.options.hooi.init = HooiOptions::Init::ones;
      else
        throw_config("benchmark config: unknown hooi init '" + init + "'");
    }
    if (j.contains("cv")) {
      const Json& c = j.at("cv");
      cfg.options.cv.folds = c.value("folds", cfg.options.cv.folds);
      if (c.contains("nu_grid"))
        cfg.options.cv.nu_grid = c.at("nu_grid").get<std::vector<double>>();
    }
    if (j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
      cfg.seed_given = true;
    }
  } catch (const Json::exception& e) {
    throw_config(std::string("benchmark config: ") + e.what());
  }
  cfg.options.spec.validate();
  return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw_io("cannot open " + path);
  out << content;
  if (!out) throw_io("write failed on " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tpls
