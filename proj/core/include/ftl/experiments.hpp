#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftl/baseline.hpp"
#include "ftl/forward_model.hpp"
#include "ftl/interpolation.hpp"
#include "ftl/planner.hpp"
#include "ftl/shape_library.hpp"

namespace ftl {

// ---------------------------------------------------------------------------
// Test paths

enum class CurveClass { c, s, robot };
inline constexpr std::array<CurveClass, 3> kAllCurveClasses{CurveClass::c, CurveClass::s,
                                                            CurveClass::robot};

std::string to_string(CurveClass cls);
/// "C", "S" or "Robot" (case-insensitive). Throws InputError.
CurveClass parse_curve_class(const std::string& text);

/// Generated C and S paths are redrawn until their arc length is at most
/// this fraction of the robot length.
inline constexpr double kArcLengthCapFraction = 0.95;

struct PathSpec {
  CurveClass cls = CurveClass::c;
  std::uint64_t seed = 0;
  std::size_t n = 10;
};

/// `n` points at equal arc-length spacing along a polyline, endpoints kept.
std::vector<Vec3> resample_polyline(std::span<const Vec3> polyline, std::size_t n);

struct CCurve {
  Vec3 endpoint;
  Vec3 plane_normal;  // in-plane direction perpendicular to the chord
  double arc_length = 0.0;
  WaypointPath path;
};

/// Half circle from the origin to an endpoint drawn from
/// [0.5,1.5] x [-0.75,0.25] x [1,2], bending plane uniform about the chord.
CCurve gen_c_curve_detail(std::uint64_t seed, std::size_t n = 10, double robot_length = 3.0);
WaypointPath gen_c_curve(std::uint64_t seed, std::size_t n = 10, double robot_length = 3.0);

struct CubicBezier {
  std::array<Vec3, 4> control;
  Vec3 operator()(double t) const;
  Vec3 derivative(double t) const;
  Vec3 second_derivative(double t) const;
};

struct SCurve {
  CubicBezier curve;
  double arc_length = 0.0;
  WaypointPath path;
};

/// Planar cubic Bezier from the origin to an endpoint drawn from
/// [-2.25,-1.25] x [-0.5,0.5] x {1.5}. The inner control points sit 40% of
/// the chord above the start and below the end, forcing one inflection.
SCurve gen_s_curve_detail(std::uint64_t seed, std::size_t n = 10, double robot_length = 3.0);
WaypointPath gen_s_curve(std::uint64_t seed, std::size_t n = 10, double robot_length = 3.0);

struct RobotCurve {
  Configuration config = Configuration::Zero();
  WaypointPath path;
};

/// Backbone of a PCC robot whose per-segment curvature magnitude is drawn
/// from [0.2, 0.8] * kappa_max, sampled at n equally spaced arc positions.
RobotCurve gen_robot_curve_detail(std::uint64_t seed, const ModelSpec& spec, std::size_t n = 10);
WaypointPath gen_robot_curve(std::uint64_t seed, const ModelSpec& spec, std::size_t n = 10);

WaypointPath generate_path(const PathSpec& spec, const ModelSpec& model_spec);

/// Seed of the k-th path of a class in a study with base seed `base`.
std::uint64_t path_seed(std::uint64_t base, CurveClass cls, std::size_t k);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double tip_dev_pct = 0.0;
  double shape_dev_pct = 0.0;
  double compute_time_s = 0.0;
  double max_tip_error = 0.0;         // robot-length units
  std::vector<double> step_shape_dev;  // per dense step, units
};

/// Path prefix reached by a tip that has travelled `alpha` of interval
/// `interval`: every waypoint up to that arc length plus the interpolated
/// tip point when it lies strictly between waypoints.
std::vector<Vec3> active_path_at(const WaypointPath& path, std::size_t interval, double alpha);

/// Tip deviation (max over steps) and shape deviation (mean over steps) as
/// a percentage of the robot length. Throws ConsistencyError when the plan
/// does not have (n - 1) * h + 1 steps.
Metrics eval_plan(const DensePlan& plan, const WaypointPath& path, const ForwardModel& model,
                  ChamferNormalization normalization = ChamferNormalization::cardinality);

// ---------------------------------------------------------------------------
// Studies

enum class Method { linear, clustered, optimization };
std::string to_string(Method method);
Method parse_method(const std::string& text);

struct LibraryConfig {
  std::size_t size = 20000;
  std::uint64_t seed = 7;
  std::size_t target_clusters = 0;  // 0: floor(1.5 * sqrt(size))
  std::optional<double> gamma;       // overrides target_clusters
};

/// Library, clustering and model shared by the studies.
struct StudyContext {
  ModelSpec spec;
  std::shared_ptr<const PccModel> model;
  LibraryPtr library;
  ClusteredLibrary clusters;
  double gamma = 0.0;
};

StudyContext make_context(const ModelSpec& spec, const LibraryConfig& config);
/// Wraps an already loaded library; clusters with `gamma` or the default
/// target when absent.
StudyContext make_context(LibraryPtr library, std::optional<double> gamma,
                          std::size_t target_clusters = 0);

struct BenchmarkConfig {
  LibraryConfig library;
  std::size_t n = 10;
  std::size_t h = 10;
  std::vector<CurveClass> classes{kAllCurveClasses.begin(), kAllCurveClasses.end()};
  std::size_t paths_per_class = 40;
  std::uint64_t path_seed = 1000;
  std::vector<Method> methods{Method::linear, Method::clustered, Method::optimization};
  SymmetryDescriptor symmetry = SymmetryDescriptor::continuous();
  BaselineOptions baseline;
  unsigned threads = 0;
  bool timing = true;       // false: every time column is 0 for byte-stable reports
  bool keep_plans = false;  // keep sparse plans in the result
};

struct PathRow {
  CurveClass cls = CurveClass::c;
  std::uint64_t seed = 0;
  Method method = Method::linear;
  double tip_dev_pct = 0.0;
  double shape_dev_pct = 0.0;
  double sparse_dev_pct = 0.0;  // searched waypoints only; baseline: final costs
  double time_s = 0.0;
  double max_tip_error = 0.0;
  std::size_t evaluations = 0;
  std::size_t steps = 0;
  double step_dev_sum_pct = 0.0;  // for pooled means
};

struct Aggregate {
  CurveClass cls = CurveClass::c;
  Method method = Method::linear;
  std::size_t paths = 0;
  double tip_dev_pct = 0.0;           // mean of per-path values
  double shape_dev_pct = 0.0;         // mean of per-path means
  double pooled_shape_dev_pct = 0.0;  // mean over all steps of all paths
  double time_s = 0.0;
  double max_tip_error = 0.0;
};

struct PlannedPath {
  CurveClass cls = CurveClass::c;
  std::uint64_t seed = 0;
  WaypointPath path;
  std::optional<SparsePlan> linear;
  std::optional<SparsePlan> clustered;
};

struct BenchmarkResult {
  BenchmarkConfig config;
  double gamma = 0.0;
  std::size_t clusters = 0;
  std::vector<PathRow> rows;  // ordered by (class, seed, method)
  std::vector<Aggregate> aggregates;
  std::vector<PlannedPath> plans;  // when keep_plans

  const Aggregate* find(CurveClass cls, Method method) const;
};

std::vector<Aggregate> aggregate_rows(const std::vector<PathRow>& rows);

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const StudyContext& ctx);

// Cluster-size sweep ---------------------------------------------------------

struct ClusterSweepConfig {
  LibraryConfig library;
  std::size_t n = 10;
  std::size_t paths_per_class = 15;
  std::uint64_t path_seed = 1000;
  /// gamma values as multiples of the default-target gamma; 0 is linear.
  std::vector<double> gamma_factors{0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
  unsigned threads = 0;
  bool timing = true;
};

struct ClusterSweepPoint {
  double gamma = 0.0;
  std::size_t clusters = 0;
  double mean_cluster_size = 0.0;
  double mean_sparse_dev_pct = 0.0;
  double std_sparse_dev_pct = 0.0;
  double mean_time_s = 0.0;  // sparse search per path
  double mean_evaluations = 0.0;
  std::vector<double> path_dev_pct;
};

struct ClusterSweepResult {
  ClusterSweepConfig config;
  std::vector<double> linear_dev_pct;  // per path, exhaustive search
  std::vector<ClusterSweepPoint> points;
};

ClusterSweepResult ablate_cluster(const ClusterSweepConfig& config, const StudyContext& ctx);

// Library-size sweep ---------------------------------------------------------

struct LibSizeConfig {
  std::vector<std::size_t> sizes{1000, 2000, 5000, 10000, 20000};
  std::uint64_t library_seed = 7;
  std::size_t n = 10;
  std::size_t paths_per_class = 15;
  std::uint64_t path_seed = 1000;
  unsigned threads = 0;
  bool timing = true;
};

struct LibSizePoint {
  std::size_t size = 0;
  double gamma = 0.0;
  std::size_t clusters = 0;
  std::vector<double> linear_dev_pct;  // per path
  std::vector<double> clustered_dev_pct;
  double linear_time_s = 0.0;  // total over paths
  double clustered_time_s = 0.0;
  double linear_evaluations = 0.0;  // mean per path
  double clustered_evaluations = 0.0;
};

struct LibSizeResult {
  LibSizeConfig config;
  std::vector<CurveClass> path_class;  // per path
  std::vector<std::uint64_t> path_seeds;
  std::vector<LibSizePoint> points;
  double linear_time_slope = 0.0;
  double clustered_time_slope = 0.0;
};

/// Nested prefixes of a single library of the largest size.
LibSizeResult ablate_libsize(const LibSizeConfig& config, const ModelSpec& spec);

// Symmetry ablation ----------------------------------------------------------

struct SymmetryAblationConfig {
  std::size_t n = 10;
  std::size_t h = 10;
  std::size_t paths_per_class = 40;
  std::uint64_t path_seed = 1000;
  std::vector<SymmetryDescriptor> variants{SymmetryDescriptor::none(),
                                           SymmetryDescriptor::discrete(3),
                                           SymmetryDescriptor::continuous()};
  unsigned threads = 0;
};

struct SymmetryRow {
  CurveClass cls = CurveClass::c;
  std::uint64_t seed = 0;
  double sparse_dev_pct = 0.0;
  std::vector<double> shape_dev_pct;  // per variant
};

struct SymmetryAblationResult {
  SymmetryAblationConfig config;
  std::vector<SymmetryRow> rows;
  /// [class][variant] means, plus overall in the last row.
  std::vector<std::vector<double>> class_means;
  std::vector<double> overall;
};

/// Linear sparse plans densified once per symmetry variant. Reuses
/// `plans` when given (e.g. from a benchmark run).
SymmetryAblationResult ablate_symmetry(const SymmetryAblationConfig& config,
                                       const StudyContext& ctx,
                                       const std::vector<PlannedPath>* plans = nullptr);

// Validation studies ---------------------------------------------------------

struct ConvergenceResult {
  std::vector<std::size_t> h_values;
  std::vector<double> max_error;
  double slope = 0.0;
  bool floor = false;  // every error at the numerical floor; slope meaningless
};

inline constexpr double kConvergenceFloor = 1e-12;

/// Max inter-step tip error for each h and the least-squares slope of
/// log(error) against log(h).
ConvergenceResult convergence_study(const SparsePlan& plan, const WaypointPath& path,
                                    const ForwardModel& model,
                                    std::span<const std::size_t> h_values,
                                    std::size_t beta_samples = 9);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

enum class CoverageNorm { inf, two };

struct CoverageConfig {
  double epsilon = 1.1;
  std::vector<std::size_t> sample_counts{25, 100, 400, 1600, 6400, 25600};
  std::size_t trials = 100;
  std::size_t probes = 1000;
  CoverageNorm norm = CoverageNorm::inf;
  std::uint64_t seed = 11;
};

struct CoverageResult {
  CoverageConfig config;
  std::vector<double> probability;
  std::vector<double> sigma;  // binomial standard error
};

/// Monte-Carlo probability that N i.i.d. uniform samples of the box put a
/// sample within epsilon of every probe configuration.
CoverageResult coverage_study(const CoverageConfig& config, const Bounds& bounds);

struct LipschitzConfig {
  std::size_t samples = 200;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  std::uint64_t seed = 13;
};

struct LipschitzResult {
  LipschitzConfig config;
  std::vector<double> max_ratio;     // per delta: max |E(q + d u) - E(q)| / d
  std::vector<double> median_ratio;  // per delta
  bool bounded = false;
};

/// Finite-difference probe of how the aligned deviation of a shape against
/// a path depends on its configuration. `bounded` holds when the median
/// difference quotient stays within 2x across the delta ladder.
LipschitzResult lipschitz_probe(const LipschitzConfig& config, const WaypointPath& path,
                                const ForwardModel& model);

struct TipExactResult {
  std::size_t paths = 0;
  std::size_t steps = 0;
  double max_error = 0.0;
};

/// Plans `paths_per_class` paths per class with clustered search and checks
/// the tip against the desired tip at every dense step.
TipExactResult tip_exact_sweep(const StudyContext& ctx, std::size_t paths_per_class,
                               std::size_t n, std::size_t h, std::uint64_t base_seed,
                               unsigned threads = 0);

}  // namespace ftl
