#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"
#include "ftl/parallel.hpp"
#include "ftl/random.hpp"

namespace ftl {

std::string to_string(Method method) {
  switch (method) {
    case Method::linear:
      return "linear";
    case Method::clustered:
      return "clustered";
    case Method::optimization:
      return "optimization";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "linear") return Method::linear;
  if (text == "clustered") return Method::clustered;
  if (text == "optimization") return Method::optimization;
  throw InputError("unknown method '" + text + "' (expected linear, clustered or optimization)");
}

StudyContext make_context(const ModelSpec& spec, const LibraryConfig& config) {
  auto model = std::make_shared<const PccModel>(spec);
  auto lib = std::make_shared<const ShapeLibrary>(
      generate_library(spec, model->sampling_bounds(), config.size, config.seed));
  StudyContext ctx = make_context(lib, config.gamma, config.target_clusters);
  return ctx;
}

StudyContext make_context(LibraryPtr library, std::optional<double> gamma,
                          std::size_t target_clusters) {
  if (!library || library->empty()) throw EmptyLibrary("study needs a non-empty library");
  StudyContext ctx;
  ctx.spec = library->spec;
  ctx.model = std::make_shared<const PccModel>(library->spec);
  ctx.library = library;
  if (gamma) {
    ctx.gamma = *gamma;
  } else {
    const std::size_t target =
        target_clusters > 0 ? target_clusters : default_cluster_target(library->size());
    ctx.gamma = suggest_threshold(*library, target);
  }
  ctx.clusters = threshold_cluster(library, ctx.gamma);
  return ctx;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct StudyPath {
  CurveClass cls;
  std::uint64_t seed;
  WaypointPath path;
};

std::vector<StudyPath> make_paths(std::span<const CurveClass> classes, std::size_t per_class,
                                  std::uint64_t base, std::size_t n, const ModelSpec& spec) {
  std::vector<StudyPath> out;
  for (CurveClass cls : classes) {
    for (std::size_t k = 0; k < per_class; ++k) {
      const std::uint64_t seed = path_seed(base, cls, k);
      out.push_back({cls, seed, generate_path(PathSpec{cls, seed, n}, spec)});
    }
  }
  return out;
}

SparsePlan search(const StudyContext& ctx, const WaypointPath& path, Method method) {
  PlannerOptions opt;
  opt.threads = 1;
  opt.mode = method == Method::clustered ? SearchMode::clustered : SearchMode::linear;
  return plan_sparse(*ctx.library, method == Method::clustered ? &ctx.clusters : nullptr, path,
                     opt);
}

struct PathOutcome {
  std::vector<PathRow> rows;
  PlannedPath planned;
};

}  // namespace

const Aggregate* BenchmarkResult::find(CurveClass cls, Method method) const {
  for (const auto& a : aggregates) {
    if (a.cls == cls && a.method == method) return &a;
  }
  return nullptr;
}

std::vector<Aggregate> aggregate_rows(const std::vector<PathRow>& rows) {
  std::vector<Aggregate> out;
  for (const PathRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Aggregate& a) {
      return a.cls == r.cls && a.method == r.method;
    });
    if (it == out.end()) {
      out.push_back(Aggregate{r.cls, r.method});
      it = out.end() - 1;
    }
    it->paths += 1;
    it->tip_dev_pct += r.tip_dev_pct;
    it->shape_dev_pct += r.shape_dev_pct;
    it->pooled_shape_dev_pct += r.step_dev_sum_pct;
    it->time_s += r.time_s;
    it->max_tip_error = std::max(it->max_tip_error, r.max_tip_error);
  }
  std::vector<std::size_t> steps(out.size(), 0);
  for (const PathRow& r : rows) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].cls == r.cls && out[k].method == r.method) steps[k] += r.steps;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    Aggregate& a = out[k];
    const double p = static_cast<double>(a.paths);
    a.tip_dev_pct /= p;
    a.shape_dev_pct /= p;
    a.time_s /= p;
    a.pooled_shape_dev_pct = steps[k] > 0 ? a.pooled_shape_dev_pct / steps[k] : 0.0;
  }
  return out;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const StudyContext& ctx) {
  if (config.n < 3) throw InputError("benchmark needs n >= 3");
  if (config.h < 1) throw InputError("benchmark needs h >= 1");
  const PccModel& model = *ctx.model;
  const auto paths =
      make_paths(config.classes, config.paths_per_class, config.path_seed, config.n, ctx.spec);

  std::optional<SymmetryIndex> sym_index;
  if (config.symmetry.kind == SymmetryDescriptor::Kind::data_driven) {
    sym_index = build_symmetry_index(*ctx.library, config.symmetry.gamma_sym);
  }

  const unsigned threads = resolve_threads(config.threads);
  const auto outcomes = parallel_map<PathOutcome>(paths.size(), threads, [&](std::size_t i) {
    const StudyPath& sp = paths[i];
    PathOutcome out;
    out.planned = PlannedPath{sp.cls, sp.seed, sp.path, std::nullopt, std::nullopt};
    for (Method method : config.methods) {
      PathRow row;
      row.cls = sp.cls;
      row.seed = sp.seed;
      row.method = method;
      DensePlan dense;
      const auto start = Clock::now();
      if (method == Method::optimization) {
        BaselinePlan bp = plan_baseline(sp.path, model, config.h, config.baseline);
        row.time_s = seconds_since(start);
        BaselineOptions chamfer_only = config.baseline;
        chamfer_only.lambda_tip = 0.0;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 3; k <= sp.path.size(); ++k) {
          sum += baseline_cost(bp.states[k - 1], sp.path, k, model, chamfer_only);
          ++count;
        }
        row.sparse_dev_pct = count > 0 ? 100.0 * sum / count / model.nominal_length() : 0.0;
        dense = std::move(bp.dense);
      } else {
        const SparsePlan sparse = search(ctx, sp.path, method);
        const SparsePlan aligned =
            prealign_radial(sparse, config.symmetry, model, ctx.library.get(),
                            sym_index ? &*sym_index : nullptr);
        dense = interpolate(aligned, sp.path, config.h, model);
        row.time_s = seconds_since(start);
        row.sparse_dev_pct = 100.0 * sparse.mean_searched_deviation() / model.nominal_length();
        row.evaluations = sparse.evaluations;
        if (config.keep_plans) {
          (method == Method::linear ? out.planned.linear : out.planned.clustered) = sparse;
        }
      }
      const Metrics m = eval_plan(dense, sp.path, model);
      row.tip_dev_pct = m.tip_dev_pct;
      row.shape_dev_pct = m.shape_dev_pct;
      row.max_tip_error = m.max_tip_error;
      row.steps = m.step_shape_dev.size();
      row.step_dev_sum_pct = 100.0 *
                             std::accumulate(m.step_shape_dev.begin(), m.step_shape_dev.end(),
                                             0.0) /
                             model.nominal_length();
      if (!config.timing) row.time_s = 0.0;
      out.rows.push_back(row);
    }
    return out;
  });

  BenchmarkResult result;
  result.config = config;
  result.gamma = ctx.gamma;
  result.clusters = ctx.clusters.cluster_count();
  for (const auto& o : outcomes) {
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    if (config.keep_plans) result.plans.push_back(o.planned);
  }
  result.aggregates = aggregate_rows(result.rows);
  return result;
}

ClusterSweepResult ablate_cluster(const ClusterSweepConfig& config, const StudyContext& ctx) {
  const auto paths = make_paths(kAllCurveClasses, config.paths_per_class, config.path_seed,
                                config.n, ctx.spec);
  const unsigned threads = resolve_threads(config.threads);
  const double length = ctx.spec.nominal_length();

  ClusterSweepResult result;
  result.config = config;
  result.linear_dev_pct = parallel_map<double>(paths.size(), threads, [&](std::size_t i) {
    return 100.0 * search(ctx, paths[i].path, Method::linear).mean_searched_deviation() / length;
  });

  for (double factor : config.gamma_factors) {
    ClusterSweepPoint pt;
    pt.gamma = factor * ctx.gamma;
    const ClusteredLibrary clib = threshold_cluster(ctx.library, pt.gamma);
    pt.clusters = clib.cluster_count();
    pt.mean_cluster_size = clib.mean_cluster_size();

    struct Sample {
      double dev = 0.0;
      double time = 0.0;
      double evals = 0.0;
    };
    const auto samples = parallel_map<Sample>(paths.size(), threads, [&](std::size_t i) {
      PlannerOptions opt;
      opt.mode = SearchMode::clustered;
      const auto start = Clock::now();
      const SparsePlan plan = plan_sparse(*ctx.library, &clib, paths[i].path, opt);
      Sample s;
      s.time = config.timing ? seconds_since(start) : 0.0;
      s.dev = 100.0 * plan.mean_searched_deviation() / length;
      s.evals = static_cast<double>(plan.evaluations);
      return s;
    });
    double sq = 0.0;
    for (const auto& s : samples) {
      pt.path_dev_pct.push_back(s.dev);
      pt.mean_time_s += s.time;
      pt.mean_evaluations += s.evals;
    }
    const double p = static_cast<double>(samples.size());
    pt.mean_sparse_dev_pct = mean(pt.path_dev_pct);
    for (double d : pt.path_dev_pct) sq += (d - pt.mean_sparse_dev_pct) * (d - pt.mean_sparse_dev_pct);
    pt.std_sparse_dev_pct = p > 1 ? std::sqrt(sq / (p - 1.0)) : 0.0;
    pt.mean_time_s /= p;
    pt.mean_evaluations /= p;
    result.points.push_back(std::move(pt));
  }
  return result;
}

LibSizeResult ablate_libsize(const LibSizeConfig& config, const ModelSpec& spec) {
  if (config.sizes.empty()) throw InputError("ablate_libsize: no library sizes");
  const std::size_t largest = *std::max_element(config.sizes.begin(), config.sizes.end());
  const PccModel model(spec);
  const ShapeLibrary full =
      generate_library(spec, model.sampling_bounds(), largest, config.library_seed);
  const auto paths = make_paths(kAllCurveClasses, config.paths_per_class, config.path_seed,
                                config.n, spec);
  const unsigned threads = resolve_threads(config.threads);
  const double length = spec.nominal_length();

  LibSizeResult result;
  result.config = config;
  for (const auto& p : paths) {
    result.path_class.push_back(p.cls);
    result.path_seeds.push_back(p.seed);
  }

  std::vector<double> sizes;
  std::vector<double> linear_t;
  std::vector<double> clustered_t;
  for (std::size_t size : config.sizes) {
    auto prefix = std::make_shared<ShapeLibrary>();
    prefix->spec = full.spec;
    prefix->seed = full.seed;
    prefix->bounds = full.bounds;
    prefix->shapes.assign(full.shapes.begin(), full.shapes.begin() + static_cast<long>(size));
    StudyContext ctx = make_context(LibraryPtr(prefix), std::nullopt);

    struct Sample {
      double lin_dev, clu_dev, lin_t, clu_t, lin_e, clu_e;
    };
    const auto samples = parallel_map<Sample>(paths.size(), threads, [&](std::size_t i) {
      Sample s{};
      auto start = Clock::now();
      const SparsePlan lin = search(ctx, paths[i].path, Method::linear);
      s.lin_t = seconds_since(start);
      start = Clock::now();
      const SparsePlan clu = search(ctx, paths[i].path, Method::clustered);
      s.clu_t = seconds_since(start);
      s.lin_dev = 100.0 * lin.mean_searched_deviation() / length;
      s.clu_dev = 100.0 * clu.mean_searched_deviation() / length;
      s.lin_e = static_cast<double>(lin.evaluations);
      s.clu_e = static_cast<double>(clu.evaluations);
      return s;
    });

    LibSizePoint pt;
    pt.size = size;
    pt.gamma = ctx.gamma;
    pt.clusters = ctx.clusters.cluster_count();
    for (const auto& s : samples) {
      pt.linear_dev_pct.push_back(s.lin_dev);
      pt.clustered_dev_pct.push_back(s.clu_dev);
      pt.linear_time_s += s.lin_t;
      pt.clustered_time_s += s.clu_t;
      pt.linear_evaluations += s.lin_e;
      pt.clustered_evaluations += s.clu_e;
    }
    pt.linear_evaluations /= static_cast<double>(samples.size());
    pt.clustered_evaluations /= static_cast<double>(samples.size());
    sizes.push_back(static_cast<double>(size));
    linear_t.push_back(pt.linear_time_s);
    clustered_t.push_back(pt.clustered_time_s);
    if (!config.timing) {
      pt.linear_time_s = 0.0;
      pt.clustered_time_s = 0.0;
    }
    result.points.push_back(std::move(pt));
  }
  if (config.timing && sizes.size() >= 2) {
    result.linear_time_slope = loglog_slope(sizes, linear_t);
    result.clustered_time_slope = loglog_slope(sizes, clustered_t);
  }
  return result;
}

SymmetryAblationResult ablate_symmetry(const SymmetryAblationConfig& config,
                                       const StudyContext& ctx,
                                       const std::vector<PlannedPath>* plans) {
  const PccModel& model = *ctx.model;
  std::vector<PlannedPath> own;
  if (plans == nullptr) {
    const auto paths = make_paths(kAllCurveClasses, config.paths_per_class, config.path_seed,
                                  config.n, ctx.spec);
    own.resize(paths.size());
    const unsigned threads = resolve_threads(config.threads);
    parallel_chunks(paths.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        own[i] = PlannedPath{paths[i].cls, paths[i].seed, paths[i].path,
                             search(ctx, paths[i].path, Method::linear), std::nullopt};
      }
    });
    plans = &own;
  }

  SymmetryAblationResult result;
  result.config = config;
  const unsigned threads = resolve_threads(config.threads);
  result.rows = parallel_map<SymmetryRow>(plans->size(), threads, [&](std::size_t i) {
    const PlannedPath& pp = (*plans)[i];
    const SparsePlan& sparse = pp.linear ? *pp.linear : pp.clustered.value();
    SymmetryRow row;
    row.cls = pp.cls;
    row.seed = pp.seed;
    row.sparse_dev_pct = 100.0 * sparse.mean_searched_deviation() / model.nominal_length();
    for (const auto& variant : config.variants) {
      const SparsePlan aligned = prealign_radial(sparse, variant, model);
      const DensePlan dense = interpolate(aligned, pp.path, config.h, model);
      row.shape_dev_pct.push_back(eval_plan(dense, pp.path, model).shape_dev_pct);
    }
    return row;
  });

  const std::size_t v = config.variants.size();
  result.overall.assign(v, 0.0);
  for (CurveClass cls : kAllCurveClasses) {
    std::vector<double> sums(v, 0.0);
    std::size_t count = 0;
    for (const auto& row : result.rows) {
      if (row.cls != cls) continue;
      for (std::size_t k = 0; k < v; ++k) sums[k] += row.shape_dev_pct[k];
      ++count;
    }
    if (count == 0) continue;
    for (double& s : sums) s /= static_cast<double>(count);
    result.class_means.push_back(sums);
  }
  for (const auto& row : result.rows) {
    for (std::size_t k = 0; k < v; ++k) result.overall[k] += row.shape_dev_pct[k];
  }
  if (!result.rows.empty()) {
    for (double& o : result.overall) o /= static_cast<double>(result.rows.size());
  }
  result.class_means.push_back(result.overall);
  return result;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("loglog_slope: bad input");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceResult convergence_study(const SparsePlan& plan, const WaypointPath& path,
                                    const ForwardModel& model,
                                    std::span<const std::size_t> h_values,
                                    std::size_t beta_samples) {
  ConvergenceResult out;
  out.h_values.assign(h_values.begin(), h_values.end());
  for (std::size_t h : h_values) {
    const DensePlan dense = interpolate(plan, path, h, model);
    const auto errors = inter_step_tip_error(dense, model, beta_samples);
    out.max_error.push_back(errors.empty() ? 0.0
                                           : *std::max_element(errors.begin(), errors.end()));
  }
  out.floor = std::all_of(out.max_error.begin(), out.max_error.end(),
                          [](double e) { return e < kConvergenceFloor; });
  if (!out.floor) {
    std::vector<double> hs(out.h_values.begin(), out.h_values.end());
    std::vector<double> errs;
    for (double e : out.max_error) errs.push_back(std::max(e, kConvergenceFloor));
    out.slope = loglog_slope(hs, errs);
  }
  return out;
}

CoverageResult coverage_study(const CoverageConfig& config, const Bounds& bounds) {
  if (!(config.epsilon > 0.0)) throw PreconditionError("coverage_study: epsilon must be > 0");
  CoverageResult out;
  out.config = config;
  std::mt19937_64 rng(config.seed);
  const auto draw = [&] {
    Configuration q;
    for (int k = 0; k < kConfigDim; ++k) q[k] = uniform(rng, bounds.lo[k], bounds.hi[k]);
    return q;
  };
  const auto within = [&](const Configuration& a, const Configuration& b) {
    return config.norm == CoverageNorm::inf ? (a - b).lpNorm<Eigen::Infinity>() <= config.epsilon
                                            : (a - b).norm() <= config.epsilon;
  };

  std::vector<Configuration> samples;
  for (std::size_t count : config.sample_counts) {
    std::size_t covered = 0;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      samples.clear();
      for (std::size_t k = 0; k < count; ++k) samples.push_back(draw());
      // All probes are drawn even after a miss so the stream stays aligned.
      bool all = true;
      for (std::size_t p = 0; p < config.probes; ++p) {
        const Configuration probe = draw();
        if (!all) continue;
        all = std::any_of(samples.begin(), samples.end(),
                          [&](const Configuration& s) { return within(s, probe); });
      }
      covered += all ? 1 : 0;
    }
    const double prob = static_cast<double>(covered) / static_cast<double>(config.trials);
    out.probability.push_back(prob);
    out.sigma.push_back(std::sqrt(prob * (1.0 - prob) / static_cast<double>(config.trials)));
  }
  return out;
}

LipschitzResult lipschitz_probe(const LipschitzConfig& config, const WaypointPath& path,
                                const ForwardModel& model) {
  if (path.size() < 3) throw InputError("lipschitz_probe: path needs >= 3 waypoints");
  LipschitzResult out;
  out.config = config;
  const Bounds box = model.sampling_bounds();
  std::mt19937_64 rng(config.seed);
  const auto deviation = [&](const Configuration& q) {
    return evaluate_candidate(model.shape(q), 0, path, path.size()).deviation;
  };

  std::vector<std::vector<double>> ratios(config.deltas.size());
  for (std::size_t s = 0; s < config.samples; ++s) {
    Configuration q;
    Configuration u;
    for (int k = 0; k < kConfigDim; ++k) {
      q[k] = uniform(rng, box.lo[k], box.hi[k]);
      u[k] = uniform(rng, -1.0, 1.0);
    }
    u.normalize();
    const double e0 = deviation(q);
    for (std::size_t d = 0; d < config.deltas.size(); ++d) {
      const double delta = config.deltas[d];
      ratios[d].push_back(std::abs(deviation(q + delta * u) - e0) / delta);
    }
  }
  for (auto& r : ratios) {
    std::sort(r.begin(), r.end());
    out.max_ratio.push_back(r.empty() ? 0.0 : r.back());
    out.median_ratio.push_back(r.empty() ? 0.0 : r[r.size() / 2]);
  }
  out.bounded = !out.median_ratio.empty();
  for (double m : out.median_ratio) {
    if (m > 2.0 * out.median_ratio.front() + 1e-12) out.bounded = false;
  }
  return out;
}

TipExactResult tip_exact_sweep(const StudyContext& ctx, std::size_t paths_per_class,
                               std::size_t n, std::size_t h, std::uint64_t base_seed,
                               unsigned threads) {
  const auto paths = make_paths(kAllCurveClasses, paths_per_class, base_seed, n, ctx.spec);
  const PccModel& model = *ctx.model;
  const auto errors = parallel_map<std::pair<double, std::size_t>>(
      paths.size(), resolve_threads(threads), [&](std::size_t i) {
        const SparsePlan sparse = search(ctx, paths[i].path, Method::clustered);
        const SparsePlan aligned = prealign_radial(sparse, model.symmetry(), model);
        const DensePlan dense = interpolate(aligned, paths[i].path, h, model);
        const Metrics m = eval_plan(dense, paths[i].path, model);
        return std::make_pair(m.max_tip_error, dense.size());
      });
  TipExactResult out;
  out.paths = paths.size();
  for (const auto& [err, steps] : errors) {
    out.max_error = std::max(out.max_error, err);
    out.steps += steps;
  }
  return out;
}

}  // namespace ftl
