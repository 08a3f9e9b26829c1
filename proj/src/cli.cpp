#include "tpls/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "tpls/io.hpp"

namespace tpls {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 12345;

// Seed precedence: explicit flag, then SHOPS_SEED, then the default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SHOPS_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw_config("SHOPS_SEED is not an unsigned integer: " + std::string(env));
    return static_cast<std::uint64_t>(v);
  }
  return kDefaultSeed;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory " + dir + ": " + ec.message());
}

struct CommonFitArgs {
  std::string x_path, y_path, out_dir;
  std::string method = "shops";
  int K = 0;
  double nu = 0.5;
  std::optional<double> nu0;
  bool sd_scale = false;
  bool no_center = false;
  std::optional<std::uint64_t> seed;
  int hooi_iters = 200;
  double hooi_tol = 1e-9;
};

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed_flag, const std::string& patterns) {
  const Json cfg = load_json_file(config_path);
  const Json& sc_json = cfg.contains("scenario") ? cfg.at("scenario") : cfg;
  SimScenario sc = scenario_from_json(sc_json);
  if (seed_flag) sc.seed = *seed_flag;
  else if (!sc_json.contains("seed")) sc.seed = resolve_seed(std::nullopt);
  // Flag beats config beats default, as in the benchmark subcommand.
  std::string pattern_dir = cfg.value("pattern_dir", std::string("data/patterns"));
  if (!patterns.empty()) pattern_dir = patterns;
  const int test_n = cfg.value("test_n", sc.n);

  ensure_dir(out_dir);
  const GroundTruth truth = generate(sc, pattern_dir);
  write_matrix_csv(truth.X, out_dir + "/X.csv");
  write_tensor(truth.Y, out_dir + "/Y.tns");
  write_tensor(truth.B, out_dir + "/B.tns");
  save_active_sets(truth.active, out_dir + "/active_sets.json");

  Rng test_rng(derive_seed(sc.seed, 0x74657374ULL));
  Matrix X_test;
  Tensor3 Y_test;
  generate_xy(truth.basis, truth.B, sc.lambda, sc.sigma2, test_n, test_rng, X_test, Y_test);
  write_matrix_csv(X_test, out_dir + "/X_test.csv");
  write_tensor(Y_test, out_dir + "/Y_test.tns");

  Json echo{{"n", sc.n},       {"p", sc.p},           {"s", sc.s},
            {"K", sc.K},       {"R", sc.R},           {"lambda", sc.lambda},
            {"sigma2", sc.sigma2}, {"theta1", sc.theta1}, {"d2", sc.d2},
            {"d3", sc.d3},     {"pattern", sc.pattern}, {"seed", sc.seed},
            {"test_n", test_n}};
  write_text_file(out_dir + "/scenario.json", echo.dump(1) + "\n");
  std::cout << "simulate: wrote " << out_dir << " (n=" << sc.n << ", p=" << sc.p
            << ", pattern=" << sc.pattern << ", seed=" << sc.seed << ")\n";
  return 0;
}

int run_fit(const CommonFitArgs& args) {
  const Matrix X = read_matrix_csv(args.x_path);
  const Tensor3 Y = read_tensor(args.y_path);
  const std::uint64_t seed = resolve_seed(args.seed);
  ensure_dir(args.out_dir);

  HooiOptions hooi;
  hooi.max_iterations = args.hooi_iters;
  hooi.tolerance = args.hooi_tol;

  std::optional<Centering> centering;
  Matrix Xc = X;
  Tensor3 Yc = Y;
  if (!args.no_center) {
    centering = Centering::fit(Y, X);
    Xc = centering->center_x(X);
    Yc = centering->center_y(Y);
  }

  const std::string model_path = args.out_dir + "/model.json";
  Tensor3 Bhat;
  if (args.method == "hopls") {
    if (args.K < 1) throw_config("fit: --k is required for hopls");
    const HoplsModel m = hopls_fit(Yc, Xc, args.K, hooi);
    save_hopls_model(m, centering, seed, model_path);
    Bhat = m.B;
  } else if (args.method == "shops") {
    if (args.K < 1) throw_config("fit: --k is required for shops");
    ThresholdSpec spec;
    spec.nu = args.nu;
    if (args.nu0) spec.nu0 = *args.nu0;
    spec.robust_scale = !args.sd_scale;
    const ShopsModel m = shops_fit(Yc, Xc, args.K, spec, hooi, seed);
    save_shops_model(m, centering, model_path);
    Bhat = m.B;
  } else if (args.method == "ols") {
    Bhat = ols_fit(Yc, Xc);
    save_ols_model(Bhat, centering, seed, model_path);
  } else {
    throw_config("fit: unknown method '" + args.method + "'");
  }
  write_tensor(Bhat, args.out_dir + "/Bhat.tns");
  std::cout << "fit: method=" << args.method << " model=" << model_path << "\n";
  return 0;
}

int run_cv(const std::string& x_path, const std::string& y_path, const std::string& out_dir,
           int folds, const std::string& nu_grid_str, int kmax, std::optional<double> nu0,
           bool no_center, const std::optional<std::uint64_t>& seed_flag) {
  const Matrix X = read_matrix_csv(x_path);
  const Tensor3 Y = read_tensor(y_path);
  const std::uint64_t seed = resolve_seed(seed_flag);
  ensure_dir(out_dir);

  CvOptions options;
  options.folds = folds;
  options.center = !no_center;
  if (nu0) options.spec.nu0 = *nu0;
  if (!nu_grid_str.empty()) {
    options.nu_grid.clear();
    std::stringstream ss(nu_grid_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) options.nu_grid.push_back(std::stod(tok));
  }
  int K_max = kmax;
  if (K_max <= 0) {
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    K_max = elbow_K(Xc);
  }

  const CvResult cv = cross_validate(Y, X, K_max, options, seed);
  write_cv_csv(cv, out_dir + "/cv_table.csv");
  Json choice{{"K", cv.chosen_K}, {"nu", cv.chosen_nu},    {"K_max", cv.K_max},
              {"folds", folds},   {"fit_count", cv.fit_count}, {"seed", seed},
              {"truncated_fits", cv.any_truncated}};
  write_text_file(out_dir + "/cv_choice.json", choice.dump(1) + "\n");
  std::cout << "cv: chose K=" << cv.chosen_K << " nu=" << cv.chosen_nu << " (K_max=" << cv.K_max
            << ")\n";
  return 0;
}

int run_benchmark(const std::string& config_path, const std::string& out_dir,
                  const std::optional<std::uint64_t>& seed_flag, const std::string& patterns) {
  BenchmarkConfig cfg = benchmark_config_from_json(load_json_file(config_path));
  if (seed_flag) cfg.seed = *seed_flag;
  else if (!cfg.seed_given) cfg.seed = resolve_seed(std::nullopt);
  if (!patterns.empty()) cfg.options.pattern_dir = patterns;
  ensure_dir(out_dir);

  const MetricsReport report = benchmark(cfg.scenarios, cfg.methods, cfg.options, cfg.seed);
  write_metrics_csv(report, out_dir + "/metrics_replicates.csv", out_dir + "/metrics_summary.csv");
  const std::string table = format_metrics_table(report);
  write_text_file(out_dir + "/table.txt", table);
  std::cout << table;
  return 0;
}

int run_report(const std::vector<std::string>& model_paths, const std::string& truth_dir,
               const std::string& out_path) {
  const Tensor3 B = read_tensor(truth_dir + "/B.tns");
  const std::array<IndexSet, 3> active = load_active_sets(truth_dir + "/active_sets.json");
  const Matrix X_test = read_matrix_csv(truth_dir + "/X_test.csv");
  const Tensor3 Y_test = read_tensor(truth_dir + "/Y_test.tns");
  std::string scenario_name = "dataset";
  if (fs::exists(truth_dir + "/scenario.json")) {
    const Json sj = load_json_file(truth_dir + "/scenario.json");
    scenario_name = "n" + std::to_string(sj.value("n", 0)) + "_R" + std::to_string(sj.value("R", 0)) +
                    "_s" + std::to_string(sj.value("s", 0)) + "_" + sj.value("pattern", std::string());
  }

  MetricsReport report;
  for (const std::string& path : model_paths) {
    const LoadedModel m = load_model(path);
    ReplicateMetrics row;
    row.scenario = scenario_name;
    row.method = m.method;
    row.replicate = 0;
    row.ok = true;
    row.estimation = estimation_error(m.B, B);
    // Prediction through the stored centering, matching in-process fits.
    const Tensor3 fitted = m.predict(X_test);
    row.prediction = frobenius_norm(subtract(Y_test, fitted)) /
                     std::sqrt(static_cast<double>(X_test.rows()));
    const Dims3 d = m.B.dims();
    const TprFpr m1 = tpr_fpr(m.active[0], active[0], d.d1);
    const TprFpr m2 = tpr_fpr(m.active[1], active[1], d.d2);
    const TprFpr m3 = tpr_fpr(m.active[2], active[2], d.d3);
    row.tpr1 = m1.tpr;
    row.fpr1 = m1.fpr;
    row.tpr23 = 0.5 * (m2.tpr + m3.tpr);
    row.fpr23 = 0.5 * (m2.fpr + m3.fpr);
    report.replicates.push_back(row);

    MethodSummary summary;
    summary.scenario = row.scenario;
    summary.method = row.method;
    summary.replicates = 1;
    summary.estimation = {row.estimation, 0.0};
    summary.prediction = {row.prediction, 0.0};
    summary.tpr1 = {row.tpr1, 0.0};
    summary.fpr1 = {row.fpr1, 0.0};
    summary.tpr23 = {row.tpr23, 0.0};
    summary.fpr23 = {row.fpr23, 0.0};
    report.summaries.push_back(summary);
  }

  std::ofstream out(out_path);
  if (!out) throw_io("report: cannot open " + out_path);
  out << "scenario,method,estimation_error,prediction_error,tpr1,fpr1,tpr23,fpr23\n";
  for (const auto& s : report.summaries)
    out << s.scenario << ',' << s.method << ',' << format_double(s.estimation.mean) << ','
        << format_double(s.prediction.mean) << ',' << format_double(s.tpr1.mean) << ','
        << format_double(s.fpr1.mean) << ',' << format_double(s.tpr23.mean) << ','
        << format_double(s.fpr23.mean) << '\n';
  std::cout << format_metrics_table(report);
  return 0;
}

int run_export_slices(const std::string& model_path, int index_1based, const std::string& out_path) {
  const LoadedModel m = load_model(model_path);
  const Dims3 d = m.B.dims();
  if (index_1based < 1 || index_1based > d.d1)
    throw_config("export-slices: index " + std::to_string(index_1based) + " outside [1, " +
                 std::to_string(d.d1) + "]");
  Matrix slice(d.d2, d.d3);
  const double* src = m.B.slice(index_1based - 1);
  for (int j = 0; j < d.d2; ++j)
    for (int k = 0; k < d.d3; ++k) slice(j, k) = src[static_cast<std::int64_t>(j) * d.d3 + k];
  write_matrix_csv(slice, out_path);
  std::cout << "export-slices: wrote " << out_path << " (" << d.d2 << "x" << d.d3 << ")\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"tensor-response PLS toolkit (sparse and dense fits, simulation, benchmarks)"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset from a scenario config");
  std::string sim_config, sim_out, sim_patterns;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--config", sim_config, "scenario config (JSON)")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--seed", sim_seed, "RNG seed (overrides config and SHOPS_SEED)");
  sim->add_option("--patterns", sim_patterns, "pattern bitmap directory");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model to a dataset");
  CommonFitArgs fa;
  fit->add_option("--method", fa.method, "shops | hopls | ols")->required();
  fit->add_option("--x", fa.x_path, "covariate CSV")->required();
  fit->add_option("--y", fa.y_path, "response tensor file")->required();
  fit->add_option("--out", fa.out_dir, "output directory")->required();
  fit->add_option("--k", fa.K, "component count");
  fit->add_option("--nu", fa.nu, "fraction-of-max hard threshold in (0,1)");
  fit->add_option("--nu0", fa.nu0, "soft-threshold multiplier");
  fit->add_flag("--sd-scale", fa.sd_scale, "use standard deviations instead of MAD scales");
  fit->add_flag("--no-center", fa.no_center, "skip centering");
  fit->add_option("--seed", fa.seed, "RNG seed");
  fit->add_option("--hooi-iters", fa.hooi_iters, "max alternating iterations");
  fit->add_option("--hooi-tol", fa.hooi_tol, "alternating-iteration tolerance");

  // cv
  auto* cv = app.add_subcommand("cv", "cross-validate (K, nu) for the sparse fit");
  std::string cv_x, cv_y, cv_out, cv_grid;
  int cv_folds = 5, cv_kmax = 0;
  std::optional<double> cv_nu0;
  bool cv_no_center = false;
  std::optional<std::uint64_t> cv_seed;
  cv->add_option("--x", cv_x, "covariate CSV")->required();
  cv->add_option("--y", cv_y, "response tensor file")->required();
  cv->add_option("--out", cv_out, "output directory")->required();
  cv->add_option("--folds", cv_folds, "fold count (default 5)");
  cv->add_option("--nu-grid", cv_grid, "comma-separated nu grid (default 0.1..0.9)");
  cv->add_option("--kmax", cv_kmax, "component upper bound (0 = scree elbow)");
  cv->add_option("--nu0", cv_nu0, "soft-threshold multiplier");
  cv->add_flag("--no-center", cv_no_center, "skip centering");
  cv->add_option("--seed", cv_seed, "RNG seed");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Monte-Carlo method comparison from a config");
  std::string bench_config, bench_out, bench_patterns;
  std::optional<std::uint64_t> bench_seed;
  bench->add_option("--config", bench_config, "benchmark config (JSON)")->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--seed", bench_seed, "RNG seed (overrides config and SHOPS_SEED)");
  bench->add_option("--patterns", bench_patterns, "pattern bitmap directory");

  // report
  auto* rep = app.add_subcommand("report", "evaluate fitted models against a simulated truth");
  std::vector<std::string> rep_models;
  std::string rep_truth, rep_out;
  rep->add_option("--model", rep_models, "model file(s)")->required();
  rep->add_option("--truth", rep_truth, "simulate output directory")->required();
  rep->add_option("--out", rep_out, "metrics CSV path")->required();

  // export-slices
  auto* exp = app.add_subcommand("export-slices", "write one coefficient slice as a CSV heatmap");
  std::string exp_model, exp_out;
  int exp_index = 1;
  exp->add_option("--model", exp_model, "model file")->required();
  exp->add_option("--index", exp_index, "1-based mode-1 slice index")->required();
  exp->add_option("--out", exp_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << Json{{"error", {{"category", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(ErrorCategory::usage);
  }

  try {
    if (sim->parsed()) return run_simulate(sim_config, sim_out, sim_seed, sim_patterns);
    if (fit->parsed()) return run_fit(fa);
    if (cv->parsed())
      return run_cv(cv_x, cv_y, cv_out, cv_folds, cv_grid, cv_kmax, cv_nu0, cv_no_center, cv_seed);
    if (bench->parsed()) return run_benchmark(bench_config, bench_out, bench_seed, bench_patterns);
    if (rep->parsed()) return run_report(rep_models, rep_truth, rep_out);
    if (exp->parsed()) return run_export_slices(exp_model, exp_index, exp_out);
  } catch (const Error& e) {
    std::cerr << Json{{"error", {{"category", e.category_name()}, {"message", e.what()}}}}.dump()
              << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"category", "compute"}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(ErrorCategory::compute);
  }
  return static_cast<int>(ErrorCategory::usage);
}

}  // namespace tpls
