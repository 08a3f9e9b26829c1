#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "test_util.hpp"
#include "tpls/io.hpp"

using namespace tpls;
using namespace tpls::testutil;
namespace fs = std::filesystem;

namespace {

const std::string kCli = TPLS_CLI_PATH;
const std::string kPatternDir = TPLS_PATTERN_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tpls_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
  int exit_code;
  std::string out, err;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const std::string out_path = dir.file("stdout.txt");
  const std::string err_path = dir.file("stderr.txt");
  const std::string cmd = kCli + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out_path);
  r.err = read_text_file(err_path);
  return r;
}

std::string small_scenario_json() {
  return R"({"n": 40, "p": 60, "s": 12, "K": 3, "R": 1, "pattern": "square", "seed": 17})";
}

}  // namespace

TEST_CASE("cli: simulate -> fit -> report produces a one-row metrics CSV") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json")) << small_scenario_json();

  const RunResult sim = run_cli(dir, "simulate --config " + dir.file("scenario.json") + " --out " +
                                         dir.file("sim") + " --patterns " + kPatternDir);
  REQUIRE_MESSAGE(sim.exit_code == 0, sim.err);
  for (const char* name : {"X.csv", "Y.tns", "B.tns", "active_sets.json", "X_test.csv",
                           "Y_test.tns", "scenario.json"})
    CHECK(fs::exists(fs::path(dir.file("sim")) / name));

  const RunResult fit = run_cli(dir, "fit --method shops --x " + dir.file("sim/X.csv") + " --y " +
                                         dir.file("sim/Y.tns") + " --k 3 --nu 0.5 --seed 7 --out " +
                                         dir.file("fit"));
  REQUIRE_MESSAGE(fit.exit_code == 0, fit.err);
  CHECK(fs::exists(dir.file("fit/model.json")));
  CHECK(fs::exists(dir.file("fit/Bhat.tns")));

  const RunResult rep = run_cli(dir, "report --model " + dir.file("fit/model.json") + " --truth " +
                                         dir.file("sim") + " --out " + dir.file("metrics.csv"));
  REQUIRE_MESSAGE(rep.exit_code == 0, rep.err);
  const std::string csv = read_text_file(dir.file("metrics.csv"));
  CHECK(csv.find("scenario,method,estimation_error,prediction_error,tpr1,fpr1,tpr23,fpr23") !=
        std::string::npos);
  CHECK(csv.find("shops") != std::string::npos);
  // Header plus exactly one row.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("cli: fit reproduces the in-process fit bit-exactly") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json")) << small_scenario_json();
  REQUIRE(run_cli(dir, "simulate --config " + dir.file("scenario.json") + " --out " +
                           dir.file("sim") + " --patterns " + kPatternDir)
              .exit_code == 0);
  REQUIRE(run_cli(dir, "fit --method shops --x " + dir.file("sim/X.csv") + " --y " +
                           dir.file("sim/Y.tns") + " --k 3 --nu 0.5 --seed 7 --out " +
                           dir.file("fit"))
              .exit_code == 0);

  // Recompute in-process from the same files with the same seed.
  const Matrix X = read_matrix_csv(dir.file("sim/X.csv"));
  const Tensor3 Y = read_tensor(dir.file("sim/Y.tns"));
  const Centering centering = Centering::fit(Y, X);
  ThresholdSpec spec;
  spec.nu = 0.5;
  const ShopsModel m =
      shops_fit(centering.center_y(Y), centering.center_x(X), 3, spec, {}, 7);

  const Tensor3 Bhat = read_tensor(dir.file("fit/Bhat.tns"));
  CHECK(Bhat == m.B);  // bitwise

  const LoadedModel loaded = load_model(dir.file("fit/model.json"));
  CHECK(loaded.B == m.B);
}

TEST_CASE("cli: identical seeds give byte-identical outputs") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json")) << small_scenario_json();
  for (const char* tag : {"a", "b"}) {
    REQUIRE(run_cli(dir, std::string("simulate --config ") + dir.file("scenario.json") +
                             " --out " + dir.file(std::string("sim_") + tag) + " --patterns " +
                             kPatternDir)
                .exit_code == 0);
  }
  for (const char* name : {"X.csv", "Y.tns", "B.tns", "Y_test.tns"})
    CHECK(read_text_file(dir.file(std::string("sim_a/") + name)) ==
          read_text_file(dir.file(std::string("sim_b/") + name)));
}

TEST_CASE("cli: export-slices writes the requested coefficient slice") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json")) << small_scenario_json();
  REQUIRE(run_cli(dir, "simulate --config " + dir.file("scenario.json") + " --out " +
                           dir.file("sim") + " --patterns " + kPatternDir)
              .exit_code == 0);
  REQUIRE(run_cli(dir, "fit --method hopls --x " + dir.file("sim/X.csv") + " --y " +
                           dir.file("sim/Y.tns") + " --k 3 --out " + dir.file("fit"))
              .exit_code == 0);
  REQUIRE(run_cli(dir, "export-slices --model " + dir.file("fit/model.json") +
                           " --index 2 --out " + dir.file("slice.csv"))
              .exit_code == 0);
  const Matrix slice = read_matrix_csv(dir.file("slice.csv"));
  const LoadedModel m = load_model(dir.file("fit/model.json"));
  REQUIRE(slice.rows() == 64);
  REQUIRE(slice.cols() == 64);
  for (int j = 0; j < 64; j += 13)
    for (int k = 0; k < 64; k += 13) CHECK(slice(j, k) == m.B.at(1, j, k));

  const RunResult bad = run_cli(dir, "export-slices --model " + dir.file("fit/model.json") +
                                         " --index 999 --out " + dir.file("slice2.csv"));
  CHECK(bad.exit_code == static_cast<int>(ErrorCategory::config));
}

TEST_CASE("cli: benchmark emits replicate and summary CSVs plus a table") {
  TempDir dir;
  std::ofstream(dir.file("bench.json")) << R"({
    "scenarios": [{"name": "tiny", "n": 40, "p": 60, "s": 12, "K": 3, "R": 1, "pattern": "square"}],
    "methods": ["shops", "hopls", "ols"],
    "replicates": 2,
    "seed": 3,
    "pattern_dir": ")" << kPatternDir << R"("
  })";
  const RunResult bench =
      run_cli(dir, "benchmark --config " + dir.file("bench.json") + " --out " + dir.file("out"));
  REQUIRE_MESSAGE(bench.exit_code == 0, bench.err);
  const std::string summary = read_text_file(dir.file("out/metrics_summary.csv"));
  CHECK(summary.find("estimation_mean") != std::string::npos);
  for (const char* m : {"shops", "hopls", "ols"}) CHECK(summary.find(m) != std::string::npos);
  const std::string table = read_text_file(dir.file("out/table.txt"));
  CHECK(table.find("Estimation error") != std::string::npos);
  CHECK(table.find("TPR_1") != std::string::npos);
  CHECK(table.find("FPR_23") != std::string::npos);
  // n=40 <= p=60: least squares row reports not applicable.
  CHECK(table.find("n/a") != std::string::npos);
}

TEST_CASE("cli: cv writes the error table and the chosen pair") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json")) << small_scenario_json();
  REQUIRE(run_cli(dir, "simulate --config " + dir.file("scenario.json") + " --out " +
                           dir.file("sim") + " --patterns " + kPatternDir)
              .exit_code == 0);
  const RunResult cv = run_cli(dir, "cv --x " + dir.file("sim/X.csv") + " --y " +
                                        dir.file("sim/Y.tns") +
                                        " --folds 2 --nu-grid 0.4,0.6 --kmax 2 --seed 5 --out " +
                                        dir.file("cv"));
  REQUIRE_MESSAGE(cv.exit_code == 0, cv.err);
  const std::string table = read_text_file(dir.file("cv/cv_table.csv"));
  CHECK(table.find("K,nu,mean_cv_error,se,folds") != std::string::npos);
  // Header plus K_max * |grid| rows.
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 2 * 2);
  const Json choice = load_json_file(dir.file("cv/cv_choice.json"));
  CHECK(choice.at("K").get<int>() >= 1);
  CHECK(choice.at("K").get<int>() <= 2);
  const double nu = choice.at("nu").get<double>();
  CHECK((nu == 0.4 || nu == 0.6));
  CHECK(choice.at("fit_count").get<int>() == 4);
}

TEST_CASE("cli: error paths use machine-readable categories and codes") {
  TempDir dir;
  const RunResult usage = run_cli(dir, "frobnicate --nope");
  CHECK(usage.exit_code == static_cast<int>(ErrorCategory::usage));
  CHECK(usage.err.find("\"category\":\"usage\"") != std::string::npos);

  std::ofstream(dir.file("bad.json")) << R"({"n": 40})";
  const RunResult cfg = run_cli(dir, "simulate --config " + dir.file("bad.json") + " --out " +
                                         dir.file("x") + " --patterns " + kPatternDir);
  CHECK(cfg.exit_code == static_cast<int>(ErrorCategory::config));
  CHECK(cfg.err.find("\"category\":\"config\"") != std::string::npos);

  const RunResult io = run_cli(dir, "fit --method shops --x missing.csv --y missing.tns --k 2 --out " +
                                        dir.file("y"));
  CHECK(io.exit_code == static_cast<int>(ErrorCategory::io));
}

TEST_CASE("cli: SHOPS_SEED is used when no --seed is given") {
  TempDir dir;
  std::ofstream(dir.file("scenario.json"))
      << R"({"n": 40, "p": 60, "s": 12, "K": 3, "R": 1, "pattern": "square"})";
  const std::string base = "simulate --config " + dir.file("scenario.json") + " --patterns " +
                           kPatternDir + " --out ";
  const std::string cmd = "SHOPS_SEED=444 " + kCli + " " + base + dir.file("env_sim") + " > " +
                          dir.file("o.txt") + " 2> " + dir.file("e.txt");
  REQUIRE(std::system(cmd.c_str()) == 0);
  const Json echo = load_json_file(dir.file("env_sim/scenario.json"));
  CHECK(echo.at("seed").get<std::uint64_t>() == 444);
}
