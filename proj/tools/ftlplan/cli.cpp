#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"
#include "ftl/parallel.hpp"
#include "ftl/report.hpp"
#include "ftl/serialization.hpp"

namespace ftl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  unsigned threads = 0;
  bool strict = false;
  bool no_timing = false;
  std::string out_dir = ".";
};

struct LibrarySource {
  std::string file;
  std::size_t n_lib = 20000;
  std::uint64_t seed = 7;
  std::optional<double> gamma;
  std::size_t target_clusters = 0;
};

void add_library_options(CLI::App* cmd, LibrarySource& src) {
  cmd->add_option("--library", src.file, "Library JSON file (generated in memory when absent)");
  cmd->add_option("--n-lib", src.n_lib, "Library size when generating")->check(CLI::PositiveNumber);
  cmd->add_option("--lib-seed", src.seed, "Library seed when generating");
  cmd->add_option("--gamma", src.gamma, "Clustering threshold")->check(CLI::NonNegativeNumber);
  cmd->add_option("--target-clusters", src.target_clusters,
                  "Cluster count target used to pick gamma (default floor(1.5*sqrt(N)))");
}

void add_common_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--threads", c.threads, "Worker threads (0: FTL_THREADS or all cores)")
      ->envname("FTL_THREADS");
  cmd->add_flag("--strict", c.strict, "Exit with code 4 when a check fails");
  cmd->add_flag("--no-timing", c.no_timing, "Write 0 for wall-clock times (byte-stable output)");
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
}

StudyContext load_context(const LibrarySource& src) {
  if (!src.file.empty()) {
    auto lib = std::make_shared<const ShapeLibrary>(load_library(src.file));
    return make_context(lib, src.gamma, src.target_clusters);
  }
  LibraryConfig cfg;
  cfg.size = src.n_lib;
  cfg.seed = src.seed;
  cfg.gamma = src.gamma;
  cfg.target_clusters = src.target_clusters;
  return make_context(ModelSpec{}, cfg);
}

void echo_library(ConfigEcho& echo, const LibrarySource& src, const StudyContext& ctx) {
  if (!src.file.empty()) echo.emplace_back("library", src.file);
  echo.emplace_back("n_lib", static_cast<std::uint64_t>(ctx.library->size()));
  echo.emplace_back("lib_seed", ctx.library->seed);
  echo.emplace_back("gamma", ctx.gamma);
  echo.emplace_back("clusters", static_cast<std::uint64_t>(ctx.clusters.cluster_count()));
  echo.emplace_back("intervals", static_cast<std::int64_t>(ctx.spec.intervals));
  echo.emplace_back("kappa_max", ctx.spec.kappa_max);
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

int finish(const std::vector<Check>& checks, bool strict, std::ostream& out) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.pass;
  }
  return strict && !all ? kStrictFailure : kOk;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// gen-library ---------------------------------------------------------------

struct GenLibraryArgs {
  std::size_t n = 20000;
  std::uint64_t seed = 7;
  std::string out;
  std::string clusters_out;
  std::optional<double> gamma;
  std::size_t target_clusters = 0;
  int intervals = 60;
  double kappa_max = std::numbers::pi / 2.0;
};

int cmd_gen_library(const GenLibraryArgs& a, std::ostream& out) {
  ModelSpec spec;
  spec.intervals = a.intervals;
  spec.kappa_max = a.kappa_max;
  spec.validate();
  const PccModel model(spec);
  auto lib = std::make_shared<const ShapeLibrary>(
      generate_library(spec, model.sampling_bounds(), a.n, a.seed));
  save_library(*lib, a.out);
  const auto bytes = fs::file_size(a.out);
  out << "N_lib=" << lib->size() << " D=" << spec.intervals << " bounds=[" << lib->bounds.lo[0]
      << ", " << lib->bounds.hi[0] << "]^6 bytes=" << bytes << " -> " << a.out << "\n";
  if (!a.clusters_out.empty()) {
    const double gamma =
        a.gamma ? *a.gamma
                : suggest_threshold(*lib, a.target_clusters > 0 ? a.target_clusters
                                                                : default_cluster_target(lib->size()));
    const ClusteredLibrary clusters = threshold_cluster(lib, gamma);
    save_clusters(clusters, a.clusters_out);
    out << "gamma=" << gamma << " clusters=" << clusters.cluster_count() << " -> "
        << a.clusters_out << "\n";
  }
  return kOk;
}

// plan ------------------------------------------------------------------------

struct PlanArgs {
  LibrarySource lib;
  std::string clusters_file;
  std::string path_file;
  std::string generate;
  std::size_t n = 10;
  std::string mode = "clustered";
  std::size_t h = 10;
  std::string symmetry = "continuous";
  std::string out;
  double lambda_tip = 10.0;
  Common common;
};

WaypointPath resolve_path(const PlanArgs& a, const ModelSpec& spec) {
  if (!a.path_file.empty()) return load_path(a.path_file);
  const auto parts = split(a.generate, ':');
  if (parts.size() != 2) throw InputError("--generate expects CLASS:SEED, e.g. C:1000");
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(parts[1]);
  } catch (const std::exception&) {
    throw InputError("--generate seed must be an unsigned integer");
  }
  return generate_path(PathSpec{parse_curve_class(parts[0]), seed, a.n}, spec);
}

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const Method method = parse_method(a.mode);
  const SymmetryDescriptor symmetry = SymmetryDescriptor::parse(a.symmetry);
  // Validate cheap inputs before the expensive library work.
  const WaypointPath path = resolve_path(a, ModelSpec{});
  if (path.size() < 3) {
    throw InputError("planning needs at least three non-collinear active waypoints");
  }
  if (a.h < 1) throw InputError("--h must be >= 1");

  StudyContext ctx;
  if (method == Method::clustered && !a.clusters_file.empty()) {
    if (a.lib.file.empty()) throw InputError("--clusters requires --library");
    auto lib = std::make_shared<const ShapeLibrary>(load_library(a.lib.file));
    ctx.spec = lib->spec;
    ctx.model = std::make_shared<const PccModel>(lib->spec);
    ctx.library = lib;
    ctx.clusters = load_clusters(a.clusters_file, lib);
    ctx.gamma = ctx.clusters.gamma;
  } else if (method == Method::optimization) {
    ctx.spec = ModelSpec{};
    ctx.model = std::make_shared<const PccModel>(ctx.spec);
  } else {
    ctx = load_context(a.lib);
  }
  const PccModel& model = *ctx.model;

  PlanRecord record;
  record.method = to_string(method);
  const auto start = std::chrono::steady_clock::now();
  if (method == Method::optimization) {
    BaselineOptions opt;
    opt.lambda_tip = a.lambda_tip;
    BaselinePlan bp = plan_baseline(path, model, a.h, opt);
    record.dense = std::move(bp.dense);
  } else {
    PlannerOptions opt;
    opt.mode = method == Method::clustered ? SearchMode::clustered : SearchMode::linear;
    opt.threads = resolve_threads(a.common.threads);
    std::optional<SymmetryIndex> index;
    if (symmetry.kind == SymmetryDescriptor::Kind::data_driven) {
      index = build_symmetry_index(*ctx.library, symmetry.gamma_sym);
    }
    const SparsePlan sparse = plan_sparse(
        *ctx.library, method == Method::clustered ? &ctx.clusters : nullptr, path, opt);
    const SparsePlan aligned =
        prealign_radial(sparse, symmetry, model, ctx.library.get(), index ? &*index : nullptr);
    record.dense = interpolate(aligned, path, a.h, model);
    record.sparse = sparse;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record.metrics = eval_plan(record.dense, path, model);
  record.metrics.compute_time_s = a.common.no_timing ? 0.0 : elapsed;

  ConfigEcho& echo = record.config;
  echo.emplace_back("command", "plan");
  echo.emplace_back("mode", a.mode);
  if (!a.path_file.empty()) echo.emplace_back("path", a.path_file);
  if (!a.generate.empty()) echo.emplace_back("generate", a.generate);
  echo.emplace_back("n", static_cast<std::uint64_t>(path.size()));
  echo.emplace_back("h", static_cast<std::uint64_t>(a.h));
  echo.emplace_back("symmetry", symmetry.to_string());
  if (method == Method::optimization) {
    echo.emplace_back("lambda_tip", a.lambda_tip);
  } else {
    echo_library(echo, a.lib, ctx);
  }

  write_file_atomic(a.out, plan_to_json(record, path));
  out << "method=" << record.method << " waypoints=" << path.size()
      << " steps=" << record.dense.size() << " tip_dev_pct=" << record.metrics.tip_dev_pct
      << " shape_dev_pct=" << record.metrics.shape_dev_pct
      << " time_s=" << record.metrics.compute_time_s << " -> " << a.out << "\n";
  return kOk;
}

// benchmark -------------------------------------------------------------------

struct BenchmarkArgs {
  std::string preset;
  LibrarySource lib;
  std::size_t paths_per_class = 40;
  std::string classes = "C,S,Robot";
  std::string methods = "linear,clustered,optimization";
  std::size_t n = 10;
  std::size_t h = 10;
  std::uint64_t seed = 1000;
  std::string symmetry = "continuous";
  double lambda_tip = 10.0;
  int max_iters = 200;
  Common common;
};

int cmd_benchmark(BenchmarkArgs a, std::ostream& out) {
  if (!a.preset.empty() && a.preset != "table1") {
    throw InputError("benchmark presets: table1");
  }
  if (a.preset == "table1") {
    a.lib.n_lib = 20000;
    a.paths_per_class = 40;
    a.n = 10;
    a.h = 10;
    a.classes = "C,S,Robot";
    a.methods = "linear,clustered,optimization";
    a.symmetry = "continuous";
  }
  BenchmarkConfig cfg;
  cfg.n = a.n;
  cfg.h = a.h;
  cfg.paths_per_class = a.paths_per_class;
  cfg.path_seed = a.seed;
  cfg.classes.clear();
  for (const auto& c : split(a.classes, ',')) cfg.classes.push_back(parse_curve_class(c));
  cfg.methods.clear();
  for (const auto& m : split(a.methods, ',')) cfg.methods.push_back(parse_method(m));
  cfg.symmetry = SymmetryDescriptor::parse(a.symmetry);
  cfg.baseline.lambda_tip = a.lambda_tip;
  cfg.baseline.solver.max_iters = a.max_iters;
  cfg.threads = a.common.threads;
  cfg.timing = !a.common.no_timing;
  const fs::path dir = prepare_dir(a.common.out_dir);

  const StudyContext ctx = load_context(a.lib);
  const BenchmarkResult result = run_benchmark(cfg, ctx);

  ConfigEcho echo;
  echo.emplace_back("command", "benchmark");
  if (!a.preset.empty()) echo.emplace_back("preset", a.preset);
  echo_library(echo, a.lib, ctx);
  echo.emplace_back("paths_per_class", static_cast<std::uint64_t>(cfg.paths_per_class));
  echo.emplace_back("classes", a.classes);
  echo.emplace_back("methods", a.methods);
  echo.emplace_back("n", static_cast<std::uint64_t>(cfg.n));
  echo.emplace_back("h", static_cast<std::uint64_t>(cfg.h));
  echo.emplace_back("path_seed", cfg.path_seed);
  echo.emplace_back("symmetry", cfg.symmetry.to_string());
  echo.emplace_back("lambda_tip", cfg.baseline.lambda_tip);
  echo.emplace_back("max_iters", static_cast<std::int64_t>(cfg.baseline.solver.max_iters));
  echo.emplace_back("timing", cfg.timing);

  write_file_atomic(dir / "benchmark.csv", benchmark_csv(result));
  write_file_atomic(dir / "benchmark.json", benchmark_json(result, echo));
  out << benchmark_table(result);

  std::vector<Check> checks;
  double sampling_tip = 0.0;
  bool any_sampling = false;
  bool baseline_positive = true;
  bool any_baseline = false;
  for (const auto& r : result.rows) {
    if (r.method == Method::optimization) {
      any_baseline = true;
      baseline_positive = baseline_positive && r.max_tip_error > 0.0;
    } else {
      any_sampling = true;
      sampling_tip = std::max(sampling_tip, r.max_tip_error);
    }
  }
  if (any_sampling) {
    checks.push_back({"tip-exact", sampling_tip < 1e-9, "max tip error " + fmt(sampling_tip)});
  }
  if (any_baseline) {
    checks.push_back({"baseline-tip-positive", baseline_positive,
                      "baseline tip deviation > 0 on every path"});
  }
  return finish(checks, a.common.strict, out);
}

// ablate ------------------------------------------------------------------------

struct AblateArgs {
  std::string study;
  std::string preset;
  LibrarySource lib;
  std::size_t paths_per_class = 15;
  std::size_t n = 10;
  std::size_t h = 10;
  std::uint64_t seed = 1000;
  std::string sizes = "1000,2000,5000,10000,20000";
  std::string gamma_factors = "0,0.25,0.5,0.75,1,1.5,2,3,4";
  Common common;
};

int cmd_ablate(AblateArgs a, std::ostream& out) {
  if (a.preset == "figA1") a.study = "cluster";
  if (a.preset == "figA2" || a.preset == "fig4") a.study = "libsize";
  if (a.preset == "tableA1") {
    a.study = "symmetry";
    a.paths_per_class = 40;
  }
  if (!a.preset.empty() && a.preset != "figA1" && a.preset != "figA2" && a.preset != "fig4" &&
      a.preset != "tableA1") {
    throw InputError("ablate presets: figA1, figA2, fig4, tableA1");
  }
  if (!a.preset.empty()) {
    a.lib.n_lib = 20000;
    a.n = 10;
    a.h = 10;
  }
  const fs::path dir = prepare_dir(a.common.out_dir);
  ConfigEcho echo;
  echo.emplace_back("command", "ablate");
  echo.emplace_back("study", a.study);
  if (!a.preset.empty()) echo.emplace_back("preset", a.preset);
  echo.emplace_back("paths_per_class", static_cast<std::uint64_t>(a.paths_per_class));
  echo.emplace_back("n", static_cast<std::uint64_t>(a.n));
  echo.emplace_back("path_seed", a.seed);
  echo.emplace_back("timing", !a.common.no_timing);

  std::vector<Check> checks;
  if (a.study == "cluster") {
    ClusterSweepConfig cfg;
    cfg.n = a.n;
    cfg.paths_per_class = a.paths_per_class;
    cfg.path_seed = a.seed;
    cfg.threads = a.common.threads;
    cfg.timing = !a.common.no_timing;
    cfg.gamma_factors.clear();
    for (const auto& f : split(a.gamma_factors, ',')) cfg.gamma_factors.push_back(std::stod(f));
    const StudyContext ctx = load_context(a.lib);
    echo_library(echo, a.lib, ctx);
    echo.emplace_back("gamma_factors", a.gamma_factors);
    const ClusterSweepResult r = ablate_cluster(cfg, ctx);
    write_file_atomic(dir / "ablate_cluster.csv", cluster_sweep_csv(r));
    write_file_atomic(dir / "ablate_cluster.json", cluster_sweep_json(r, echo));
    out << cluster_sweep_csv(r);
    for (const auto& p : r.points) {
      if (p.gamma == 0.0) {
        checks.push_back({"gamma0-equals-linear", p.path_dev_pct == r.linear_dev_pct,
                          "per-path sparse deviation identical"});
      }
    }
  } else if (a.study == "libsize") {
    LibSizeConfig cfg;
    cfg.sizes.clear();
    for (const auto& s : split(a.sizes, ',')) cfg.sizes.push_back(std::stoull(s));
    cfg.library_seed = a.lib.seed;
    cfg.n = a.n;
    cfg.paths_per_class = a.paths_per_class;
    cfg.path_seed = a.seed;
    cfg.threads = a.common.threads;
    cfg.timing = !a.common.no_timing;
    echo.emplace_back("sizes", a.sizes);
    echo.emplace_back("lib_seed", a.lib.seed);
    const LibSizeResult r = ablate_libsize(cfg, ModelSpec{});
    write_file_atomic(dir / "ablate_libsize.csv", libsize_csv(r));
    write_file_atomic(dir / "ablate_libsize.json", libsize_json(r, echo));
    out << libsize_csv(r);
    bool monotone = true;
    for (std::size_t k = 1; k < r.points.size(); ++k) {
      for (std::size_t p = 0; p < r.points[k].linear_dev_pct.size(); ++p) {
        monotone = monotone && r.points[k].linear_dev_pct[p] <= r.points[k - 1].linear_dev_pct[p];
      }
    }
    checks.push_back({"superset-monotone", monotone, "linear sparse deviation per path"});
  } else if (a.study == "symmetry") {
    SymmetryAblationConfig cfg;
    cfg.n = a.n;
    cfg.h = a.h;
    cfg.paths_per_class = a.paths_per_class;
    cfg.path_seed = a.seed;
    cfg.threads = a.common.threads;
    const StudyContext ctx = load_context(a.lib);
    echo_library(echo, a.lib, ctx);
    echo.emplace_back("h", static_cast<std::uint64_t>(a.h));
    const SymmetryAblationResult r = ablate_symmetry(cfg, ctx);
    write_file_atomic(dir / "ablate_symmetry.csv", symmetry_csv(r));
    write_file_atomic(dir / "ablate_symmetry.json", symmetry_json(r, echo));
    out << symmetry_csv(r);
    const auto& o = r.overall;
    checks.push_back({"ordering", o.size() == 3 && o[0] > o[1] && o[1] > o[2],
                      "none > discrete:3 > continuous overall"});
  } else {
    throw InputError("--study must be cluster, libsize or symmetry");
  }
  return finish(checks, a.common.strict, out);
}

// validate ----------------------------------------------------------------------

struct ValidateArgs {
  std::string check = "all";
  LibrarySource lib;
  std::size_t paths = 10;
  std::size_t n = 10;
  std::size_t h = 10;
  std::uint64_t seed = 1000;
  double epsilon = 1.1;
  std::size_t trials = 100;
  Common common;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const std::vector<std::string> known{"all", "tip-exact", "convergence", "coverage", "lipschitz"};
  if (std::find(known.begin(), known.end(), a.check) == known.end()) {
    throw InputError("--check must be one of all, tip-exact, convergence, coverage, lipschitz");
  }
  const auto wants = [&](const char* name) { return a.check == "all" || a.check == name; };
  const fs::path dir = prepare_dir(a.common.out_dir);

  ConfigEcho echo;
  echo.emplace_back("command", "validate");
  echo.emplace_back("check", a.check);
  echo.emplace_back("paths_per_class", static_cast<std::uint64_t>(a.paths));
  echo.emplace_back("n", static_cast<std::uint64_t>(a.n));
  echo.emplace_back("h", static_cast<std::uint64_t>(a.h));
  echo.emplace_back("path_seed", a.seed);

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool_version"] = tool_version();
  std::vector<Check> checks;
  std::optional<StudyContext> ctx;
  if (wants("tip-exact") || wants("convergence")) {
    ctx = load_context(a.lib);
    echo_library(echo, a.lib, *ctx);
  }

  if (wants("tip-exact")) {
    const TipExactResult r = tip_exact_sweep(*ctx, a.paths, a.n, a.h, a.seed, a.common.threads);
    report["tip_exact"] = {{"paths", r.paths}, {"steps", r.steps}, {"max_error", r.max_error}};
    checks.push_back({"tip-exact", r.max_error < 1e-9,
                      std::to_string(r.paths) + " paths, max error " + fmt(r.max_error)});
  }
  if (wants("convergence")) {
    const std::vector<std::size_t> hs{2, 4, 8, 16, 32};
    json rows = json::array();
    std::size_t curved = 0;
    std::size_t ok = 0;
    for (CurveClass cls : kAllCurveClasses) {
      for (std::size_t k = 0; k < a.paths; ++k) {
        const std::uint64_t seed = path_seed(a.seed, cls, k);
        const WaypointPath path = generate_path(PathSpec{cls, seed, a.n}, ctx->spec);
        PlannerOptions opt;
        opt.mode = SearchMode::clustered;
        opt.threads = resolve_threads(a.common.threads);
        const SparsePlan sparse = plan_sparse(*ctx->library, &ctx->clusters, path, opt);
        const SparsePlan aligned = prealign_radial(sparse, ctx->model->symmetry(), *ctx->model);
        const ConvergenceResult c = convergence_study(aligned, path, *ctx->model, hs);
        rows.push_back({{"class", to_string(cls)},
                        {"seed", seed},
                        {"max_error", c.max_error},
                        {"slope", c.slope},
                        {"floor", c.floor}});
        if (c.floor) continue;
        ++curved;
        ok += c.slope <= -1.8 ? 1 : 0;
      }
    }
    report["convergence"] = rows;
    const bool pass = curved > 0 && ok >= 0.9 * static_cast<double>(curved);
    checks.push_back({"convergence", pass,
                      std::to_string(ok) + "/" + std::to_string(curved) +
                          " curved paths with slope <= -1.8"});
  }
  if (wants("coverage")) {
    CoverageConfig cfg;
    cfg.epsilon = a.epsilon;
    cfg.trials = a.trials;
    const CoverageResult r = coverage_study(cfg, PccModel().sampling_bounds());
    report["coverage"] = {{"epsilon", cfg.epsilon},
                          {"sample_counts", cfg.sample_counts},
                          {"probability", r.probability},
                          {"sigma", r.sigma}};
    bool monotone = true;
    for (std::size_t k = 1; k < r.probability.size(); ++k) {
      const double tol = 2.0 * std::hypot(r.sigma[k], r.sigma[k - 1]);
      monotone = monotone && r.probability[k] + tol >= r.probability[k - 1];
    }
    const bool pass = monotone && r.probability.back() >= 0.95;
    checks.push_back({"coverage", pass, "P(cover) at largest N = " + fmt(r.probability.back())});
  }
  if (wants("lipschitz")) {
    const WaypointPath path = gen_c_curve(path_seed(a.seed, CurveClass::c, 0), a.n);
    const LipschitzResult r = lipschitz_probe(LipschitzConfig{}, path, PccModel());
    report["lipschitz"] = {{"deltas", r.config.deltas},
                           {"max_ratio", r.max_ratio},
                           {"median_ratio", r.median_ratio},
                           {"bounded", r.bounded}};
    checks.push_back({"lipschitz", r.bounded,
                      "median difference quotient " + fmt(r.median_ratio.front()) + " -> " +
                          fmt(r.median_ratio.back())});
  }

  json cfg_json = json::object();
  for (const auto& [key, value] : echo) std::visit([&](const auto& v) { cfg_json[key] = v; }, value);
  report["config"] = cfg_json;
  json results = json::array();
  for (const auto& c : checks) results.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  report["checks"] = results;
  write_file_atomic(dir / "validate.json", report.dump(1) + "\n");
  return finish(checks, a.common.strict, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ftlplan: follow-the-leader motion planning for continuum robots"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  GenLibraryArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-library", "Sample a shape library and write it as JSON");
  gen_cmd->add_option("--n", gen.n, "Number of shapes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed");
  gen_cmd->add_option("--out", gen.out, "Output library file")->required();
  gen_cmd->add_option("--clusters-out", gen.clusters_out, "Also write a cluster sidecar file");
  gen_cmd->add_option("--gamma", gen.gamma, "Clustering threshold for the sidecar");
  gen_cmd->add_option("--target-clusters", gen.target_clusters, "Cluster target for the sidecar");
  gen_cmd->add_option("--intervals", gen.intervals, "Backbone intervals D");
  gen_cmd->add_option("--kappa-max", gen.kappa_max, "Per-component curvature bound");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one path and write a plan file");
  add_library_options(plan_cmd, plan.lib);
  add_common_options(plan_cmd, plan.common);
  plan_cmd->add_option("--clusters", plan.clusters_file, "Cluster sidecar for clustered mode");
  auto* path_opt = plan_cmd->add_option("--path", plan.path_file, "Waypoint path JSON file");
  auto* gen_opt =
      plan_cmd->add_option("--generate", plan.generate, "Generated path CLASS:SEED, e.g. S:1000");
  path_opt->excludes(gen_opt);
  plan_cmd->add_option("--n", plan.n, "Waypoints for generated paths");
  plan_cmd->add_option("--mode", plan.mode, "linear, clustered or optimization");
  plan_cmd->add_option("--h", plan.h, "Interpolation steps per waypoint interval");
  plan_cmd->add_option("--symmetry", plan.symmetry,
                       "none, continuous, discrete:K or data-driven:GAMMA");
  plan_cmd->add_option("--lambda-tip", plan.lambda_tip, "Baseline tip penalty weight");
  plan_cmd->add_option("--out", plan.out, "Output plan file")->required();

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Benchmark every method over generated paths");
  add_library_options(bench_cmd, bench.lib);
  add_common_options(bench_cmd, bench.common);
  bench_cmd->add_option("--preset", bench.preset, "table1");
  bench_cmd->add_option("--paths-per-class", bench.paths_per_class, "Paths per curve class");
  bench_cmd->add_option("--classes", bench.classes, "Comma-separated curve classes");
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods");
  bench_cmd->add_option("--n", bench.n, "Waypoints per path");
  bench_cmd->add_option("--h", bench.h, "Interpolation steps");
  bench_cmd->add_option("--seed", bench.seed, "Base path seed");
  bench_cmd->add_option("--symmetry", bench.symmetry, "Pre-alignment symmetry");
  bench_cmd->add_option("--lambda-tip", bench.lambda_tip, "Baseline tip penalty weight");
  bench_cmd->add_option("--max-iters", bench.max_iters, "Baseline solver iteration cap");

  AblateArgs abl;
  auto* abl_cmd = app.add_subcommand("ablate", "Cluster, library-size and symmetry ablations");
  add_library_options(abl_cmd, abl.lib);
  add_common_options(abl_cmd, abl.common);
  abl_cmd->add_option("--study", abl.study, "cluster, libsize or symmetry");
  abl_cmd->add_option("--preset", abl.preset, "figA1, figA2, fig4 or tableA1");
  abl_cmd->add_option("--paths-per-class", abl.paths_per_class, "Paths per curve class");
  abl_cmd->add_option("--n", abl.n, "Waypoints per path");
  abl_cmd->add_option("--h", abl.h, "Interpolation steps");
  abl_cmd->add_option("--seed", abl.seed, "Base path seed");
  abl_cmd->add_option("--sizes", abl.sizes, "Library sizes for the libsize study");
  abl_cmd->add_option("--gamma-factors", abl.gamma_factors,
                      "Multiples of the default gamma for the cluster study");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Empirical checks of the planner guarantees");
  add_library_options(val_cmd, val.lib);
  add_common_options(val_cmd, val.common);
  val_cmd->add_option("--check", val.check, "all, tip-exact, convergence, coverage, lipschitz");
  val_cmd->add_option("--paths", val.paths, "Paths per curve class");
  val_cmd->add_option("--n", val.n, "Waypoints per path");
  val_cmd->add_option("--h", val.h, "Interpolation steps");
  val_cmd->add_option("--seed", val.seed, "Base path seed");
  val_cmd->add_option("--epsilon", val.epsilon, "Coverage radius (infinity norm)");
  val_cmd->add_option("--trials", val.trials, "Coverage trials per sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_library(gen, out);
    if (plan_cmd->parsed()) {
      if (plan.path_file.empty() && plan.generate.empty()) {
        throw InputError("plan needs --path or --generate");
      }
      return cmd_plan(plan, out);
    }
    if (bench_cmd->parsed()) return cmd_benchmark(bench, out);
    if (abl_cmd->parsed()) {
      if (abl.study.empty() && abl.preset.empty()) throw InputError("ablate needs --study or --preset");
      return cmd_ablate(abl, out);
    }
    if (val_cmd->parsed()) return cmd_validate(val, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid number: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kInputError;
}

}  // namespace ftl::cli
