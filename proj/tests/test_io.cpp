#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "tpls/io.hpp"

using namespace tpls;
using namespace tpls::testutil;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("tpls_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("tensor file: bit-exact round trip") {
  TempDir dir;
  Rng rng(1);
  Tensor3 T = random_tensor({7, 5, 3}, rng);
  T.at(0, 0, 0) = -0.0;
  T.at(1, 2, 2) = 1e-308;  // subnormal-adjacent magnitudes survive
  const std::string path = dir.file("t.tns");
  write_tensor(T, path);
  const Tensor3 back = read_tensor(path);
  CHECK(back == T);  // bitwise
}

TEST_CASE("tensor file: corruption and shape errors are rejected") {
  TempDir dir;
  Rng rng(2);
  const Tensor3 T = random_tensor({4, 3, 2}, rng);
  const std::string path = dir.file("t.tns");
  write_tensor(T, path);

  // Flip one payload byte -> checksum mismatch.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    char c;
    f.seekg(-1, std::ios::end);
    f.get(c);
    f.seekp(-1, std::ios::end);
    f.put(static_cast<char>(c ^ 0x1));
  }
  CHECK_THROWS_AS(read_tensor(path), Error);

  // Manifest dims inconsistent with the payload length.
  write_tensor(T, path);
  std::string text = read_text_file(path);
  const auto pos = text.find("dims: 4 3 2");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "dims: 4 3 9");
  std::ofstream(path, std::ios::binary) << text;
  CHECK_THROWS_AS(read_tensor(path), Error);

  CHECK_THROWS_AS(read_tensor(dir.file("missing.tns")), Error);

  std::ofstream(dir.file("junk.tns")) << "not a tensor\n";
  CHECK_THROWS_AS(read_tensor(dir.file("junk.tns")), Error);
}

TEST_CASE("matrix csv: round trip, ragged rejection, scientific notation") {
  TempDir dir;
  Rng rng(3);
  Matrix M = random_matrix(6, 4, rng);
  M(0, 0) = 1e-17;
  M(1, 1) = -2.5e+13;
  const std::string path = dir.file("m.csv");
  write_matrix_csv(M, path);
  const Matrix back = read_matrix_csv(path);
  REQUIRE(back.rows() == M.rows());
  REQUIRE(back.cols() == M.cols());
  CHECK((back - M).cwiseAbs().maxCoeff() == 0.0);  // 17 digits round-trip exactly

  std::ofstream(dir.file("ragged.csv")) << "1,2,3\n4,5\n";
  CHECK_THROWS_AS(read_matrix_csv(dir.file("ragged.csv")), Error);

  std::ofstream(dir.file("sci.csv")) << "1.5e3,-2E-2\n0.25,3\n";
  const Matrix sci = read_matrix_csv(dir.file("sci.csv"));
  CHECK(sci(0, 0) == 1500.0);
  CHECK(sci(0, 1) == -0.02);

  std::ofstream(dir.file("bad.csv")) << "1,zebra\n";
  CHECK_THROWS_AS(read_matrix_csv(dir.file("bad.csv")), Error);
}

TEST_CASE("model file: sparse model round trip preserves coefficients bitwise") {
  TempDir dir;
  Rng rng(4);
  const int n = 40, d1 = 12, d2 = 8, d3 = 6;
  const Matrix X = random_matrix(n, d1, rng);
  Vector u1 = Vector::Zero(d1), u2 = Vector::Zero(d2), u3 = Vector::Zero(d3);
  u1.segment(0, 4).setConstant(0.5);
  u2.segment(0, 3).setConstant(1.0 / std::sqrt(3.0));
  u3.segment(0, 3).setConstant(1.0 / std::sqrt(3.0));
  Tensor3 B = outer3(u1, u2, u3);
  scale_inplace(B, 6.0);
  Tensor3 Y = mode_multiply(B, X, 1);
  for (std::int64_t t = 0; t < Y.size(); ++t) Y.data()[t] += 0.3 * rng.gaussian();

  const Centering centering = Centering::fit(Y, X);
  const Tensor3 Yc = centering.center_y(Y);
  const Matrix Xc = centering.center_x(X);
  const ShopsModel m = shops_fit(Yc, Xc, 2, {}, {}, 31);

  const std::string path = dir.file("model.json");
  save_shops_model(m, centering, path);
  const LoadedModel loaded = load_model(path);

  CHECK(loaded.method == "shops");
  CHECK(loaded.seed == 31);
  CHECK(loaded.B == m.B);  // bitwise
  CHECK((loaded.W - m.W).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(!m.sets.stages.empty());
  CHECK(loaded.active[0].indices == m.sets.cumulative()[0].indices);

  // Load-then-predict equals fit-then-predict.
  const Matrix Xnew = random_matrix(5, d1, rng);
  const Tensor3 direct = centering.uncenter_y(coeff_predict(m.B, centering.center_x(Xnew)));
  const Tensor3 via_file = loaded.predict(Xnew);
  CHECK(via_file == direct);
}

TEST_CASE("model file: version and format are checked") {
  TempDir dir;
  const std::string path = dir.file("model.json");
  std::ofstream(path) << R"({"format":"tpls-model","version":99,"method":"shops","seed":0})";
  CHECK_THROWS_AS(load_model(path), Error);
  std::ofstream(dir.file("other.json")) << R"({"format":"something-else"})";
  CHECK_THROWS_AS(load_model(dir.file("other.json")), Error);
}

TEST_CASE("model file: dense model exposes full active sets") {
  TempDir dir;
  Rng rng(5);
  const Matrix X = random_matrix(30, 6, rng);
  const Tensor3 Y = random_tensor({30, 4, 3}, rng);
  const HoplsModel m = hopls_fit(Y, X, 2);
  const std::string path = dir.file("hopls.json");
  save_hopls_model(m, std::nullopt, 7, path);
  const LoadedModel loaded = load_model(path);
  CHECK(loaded.method == "hopls");
  CHECK(loaded.B == m.B);
  CHECK(loaded.active[0].size() == 6);
  CHECK(loaded.active[1].size() == 4);
  CHECK(loaded.active[2].size() == 3);
  CHECK(!loaded.centering.has_value());
}

TEST_CASE("active sets: 1-based on disk, 0-based in memory") {
  TempDir dir;
  const std::array<IndexSet, 3> sets = {IndexSet{1, {0, 4, 7}}, IndexSet{2, {1}},
                                        IndexSet{3, {2, 3}}};
  const std::string path = dir.file("sets.json");
  save_active_sets(sets, path);
  const Json j = load_json_file(path);
  CHECK(j.at("mode1") == Json::array({1, 5, 8}));
  const auto back = load_active_sets(path);
  CHECK(back[0].indices == sets[0].indices);
  CHECK(back[2].indices == sets[2].indices);
}

TEST_CASE("scenario and benchmark configs are schema-checked") {
  const Json good = {{"n", 40}, {"p", 60}, {"s", 12}, {"K", 3}, {"R", 1}, {"pattern", "square"}};
  const SimScenario sc = scenario_from_json(good);
  CHECK(sc.n == 40);

  Json bad = good;
  bad["s"] = 13;  // not divisible by K
  CHECK_THROWS_AS(scenario_from_json(bad), Error);

  Json missing = good;
  missing.erase("n");
  CHECK_THROWS_AS(scenario_from_json(missing), Error);

  const Json bench = {{"scenarios", Json::array({good})},
                      {"methods", Json::array({"shops", "hopls"})},
                      {"replicates", 2},
                      {"seed", 10}};
  const BenchmarkConfig cfg = benchmark_config_from_json(bench);
  CHECK(cfg.scenarios.size() == 1);
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.seed == 10);
  CHECK(cfg.seed_given);

  Json no_methods = bench;
  no_methods["methods"] = Json::array();
  CHECK_THROWS_AS(benchmark_config_from_json(no_methods), Error);

  Json bad_method = bench;
  bad_method["methods"] = Json::array({"boosting"});
  CHECK_THROWS_AS(benchmark_config_from_json(bad_method), Error);
}
