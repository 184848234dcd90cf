#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"
#include "ftl/planner.hpp"
#include "support.hpp"

using namespace ftl;
using ftl::test::max_abs_diff;

namespace {

constexpr double kPi = std::numbers::pi;

Shape straight(int intervals, double spacing) {
  std::vector<Vec3> pts;
  for (int j = 0; j <= intervals; ++j) pts.push_back(Vec3(0, 0, spacing * j));
  return Shape(Configuration::Zero(), std::move(pts), Rotation::Identity());
}

double brute_chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto one_way = [](std::span<const Vec3> x, std::span<const Vec3> y) {
    double sum = 0.0;
    for (const auto& p : x) {
      double best = 1e300;
      for (const auto& q : y) best = std::min(best, (p - q).norm());
      sum += best;
    }
    return sum / static_cast<double>(x.size());
  };
  return one_way(a, b) + one_way(b, a);
}

double line_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 u = (b - a).normalized();
  const Vec3 rel = p - a;
  return (rel - rel.dot(u) * u).norm();
}

LibraryPtr library(std::size_t n, std::uint64_t seed = 3) {
  const PccModel model;
  return std::make_shared<const ShapeLibrary>(
      generate_library(ModelSpec{}, model.sampling_bounds(), n, seed));
}

}  // namespace

TEST_CASE("waypoint path validation and arc length") {
  CHECK_THROWS_AS(WaypointPath(std::vector<Vec3>{}), InputError);
  CHECK_THROWS_AS(WaypointPath({Vec3::Zero(), Vec3::Zero()}), InputError);
  CHECK_THROWS_AS(WaypointPath({Vec3::Zero(), Vec3(0, 0, std::nan(""))}), InputError);
  const WaypointPath p({Vec3::Zero(), Vec3(3, 4, 0), Vec3(3, 4, 1)});
  CHECK(p.cumulative_arclen() == std::vector<double>{0.0, 5.0, 6.0});
  CHECK(p.total_length() == 6.0);
}

TEST_CASE("active_subset: hand-scanned examples on an 11-point straight shape") {
  const Shape s = straight(10, 0.1);
  CHECK(active_subset(s, 0.33) == 7);
  CHECK(active_subset(s, 0.35) == 6);  // tie 0.05 / 0.05 goes to the smaller m
  CHECK(active_subset(s, 1.0) == 0);
  CHECK(active_subset(s, 5.0) == 0);
}

TEST_CASE("active_subset: matches an exhaustive scan on library shapes") {
  const LibraryPtr lib = library(50);
  std::mt19937_64 rng(31);
  for (const auto& s : lib->shapes) {
    const double target = uniform(rng, 0.05, 3.5);
    const auto& p = s.points();
    int best = 0;
    double best_gap = 1e300;
    for (int m = 0; m < s.intervals(); ++m) {
      double len = 0.0;
      for (int j = m; j < s.intervals(); ++j) len += (p[j] - p[j + 1]).norm();
      const double gap = std::abs(target - len);
      if (gap < best_gap - 1e-12) {
        best_gap = gap;
        best = m;
      }
    }
    REQUIRE(active_subset(s, target) == best);
  }
}

TEST_CASE("align_base_pose: straight shape on a straight path is a fixed point") {
  const Shape s = straight(60, 0.05);
  const WaypointPath path({Vec3::Zero(), Vec3(0, 0, 1.5), Vec3(0, 0, 3)});
  const Alignment a = align_base_pose(s, active_subset(s, path.total_length()), path, 3);
  CHECK(max_abs_diff(a.base_pose.rotation, Rotation::Identity()) < 1e-12);
  CHECK(a.base_pose.translation.norm() < 1e-12);
  CHECK(a.t3_skipped);
}

TEST_CASE("align_base_pose: curved shape traced by the path is a fixed point") {
  Configuration q;
  q << 0.8, -0.3, 0.5, 1.1, -0.9, 0.2;
  const Shape s = pcc_forward(ModelSpec{}, q);
  const WaypointPath path(s.points());
  const int m = active_subset(s, path.total_length());
  REQUIRE(m == 0);
  const Alignment a = align_base_pose(s, m, path, path.size());
  CHECK(max_abs_diff(a.base_pose.rotation, Rotation::Identity()) < 1e-9);
  CHECK(a.base_pose.translation.norm() < 1e-9);
  CHECK_FALSE(a.t3_skipped);
}

TEST_CASE("align_base_pose: straight shape against a path along x") {
  // T1 = (2,0,0) - (0,0,3); T2 = quarter turn about +y mapping the active
  // chord (+z) onto the path chord (+x); T3 skipped because the path is a line.
  const Shape s = straight(60, 0.05);
  const WaypointPath path({Vec3::Zero(), Vec3(1, 0, 0), Vec3(2, 0, 0)});
  const int m = active_subset(s, path.total_length());
  CHECK(m == 20);
  const Alignment a = align_base_pose(s, m, path, 3);
  CHECK(a.t3_skipped);
  CHECK(max_abs_diff(a.base_pose.rotation, rot_y(kPi / 2)) < 1e-12);
  CHECK((a.base_pose.translation - Vec3(-1, 0, 0)).norm() < 1e-12);
  CHECK((a.aligned_points.back() - Vec3(2, 0, 0)).norm() < 1e-12);
  CHECK(a.aligned_points[20].norm() < 1e-12);
}

TEST_CASE("align_base_pose: tip exactness, rigidity and chord containment on random pairs") {
  const LibraryPtr lib = library(60);
  for (std::size_t k = 0; k < 30; ++k) {
    const WaypointPath path = gen_s_curve(100 + k);
    const Shape& s = lib->shapes[k];
    for (std::size_t count = 3; count <= path.size(); ++count) {
      const int m = active_subset(s, path.cumulative_arclen()[count - 1]);
      const Alignment a = align_base_pose(s, m, path, count);
      REQUIRE((a.aligned_points.back() - path[count - 1]).norm() < 1e-9);
      REQUIRE(is_rotation(a.base_pose.rotation, 1e-9));
      REQUIRE(line_distance(a.aligned_points[m], path[0], path[count - 1]) < 1e-9);
      for (std::size_t j = 0; j + 7 < s.points().size(); j += 7) {
        const double before = (s.points()[j] - s.points()[j + 7]).norm();
        const double after = (a.aligned_points[j] - a.aligned_points[j + 7]).norm();
        REQUIRE(std::abs(before - after) < 1e-9);
      }
    }
  }
}

TEST_CASE("shape_deviation: hand examples") {
  const std::vector<Vec3> a{Vec3::Zero()};
  const std::vector<Vec3> b{Vec3(1, 0, 0)};
  CHECK(shape_deviation(a, b) == 2.0);
  CHECK(shape_deviation(a, a) == 0.0);
  CHECK_THROWS_AS(shape_deviation(a, std::vector<Vec3>{}), PreconditionError);
}

TEST_CASE("shape_deviation: brute-force equality and symmetry") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = test::random_cloud(rng, 10);
    const auto b = test::random_cloud(rng, 61);
    const double d = shape_deviation(a, b);
    REQUIRE(d == doctest::Approx(brute_chamfer(a, b)).epsilon(1e-12));
    REQUIRE(d == doctest::Approx(shape_deviation(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("shape_deviation: arc-length normalization divides by polyline length") {
  const std::vector<Vec3> a{Vec3::Zero(), Vec3(0, 0, 2)};
  const std::vector<Vec3> b{Vec3(1, 0, 0), Vec3(1, 0, 2)};
  CHECK(shape_deviation(a, b, ChamferNormalization::arc_length) == doctest::Approx(2.0));
  CHECK(shape_deviation(a, b) == doctest::Approx(2.0));
}

TEST_CASE("search_waypoint: planted robot curve is recovered") {
  const ModelSpec spec;
  const RobotCurve rc = gen_robot_curve_detail(77, spec, 10);
  ShapeLibrary raw = generate_library(spec, PccModel().sampling_bounds(), 300, 4);
  const std::size_t planted = 123;
  raw.shapes[planted] = pcc_forward(spec, rc.config);
  const LibraryPtr lib = std::make_shared<const ShapeLibrary>(std::move(raw));
  const WaypointSearch r = search_waypoint(*lib, nullptr, rc.path, rc.path.size());
  const AlignedCandidate mine =
      evaluate_candidate(lib->shapes[planted], planted, rc.path, rc.path.size());
  CHECK(r.best.library_index == planted);
  CHECK(r.best.deviation == mine.deviation);
  CHECK(r.evaluations == lib->size());
  // Only discretization error is left: waypoints sit between backbone points.
  CHECK(mine.deviation < 0.1);
  CHECK(mine.base_pose.translation.norm() < 1e-9);
}

TEST_CASE("search_waypoint: exact realization scores zero") {
  const ModelSpec spec;
  ShapeLibrary raw = generate_library(spec, PccModel().sampling_bounds(), 50, 4);
  Configuration q;
  q << 0.4, 0.2, -0.6, 0.3, 0.7, -0.1;
  raw.shapes[17] = pcc_forward(spec, q);
  const WaypointPath path(raw.shapes[17].points());
  const LibraryPtr lib = std::make_shared<const ShapeLibrary>(std::move(raw));
  const WaypointSearch r = search_waypoint(*lib, nullptr, path, path.size());
  CHECK(r.best.library_index == 17);
  CHECK(r.best.deviation < 1e-9);
}

TEST_CASE("search_waypoint: linear mode is optimal, gamma 0 clustered equals linear") {
  const LibraryPtr lib = library(400);
  const ClusteredLibrary singles = threshold_cluster(lib, 0.0);
  const WaypointPath path = gen_c_curve(5);
  for (std::size_t count : {3u, 6u, 10u}) {
    const WaypointSearch lin = search_waypoint(*lib, nullptr, path, count);
    double best = 1e300;
    for (std::size_t i = 0; i < lib->size(); ++i) {
      best = std::min(best, evaluate_candidate(lib->shapes[i], i, path, count).deviation);
    }
    CHECK(lin.best.deviation == best);

    PlannerOptions clustered;
    clustered.mode = SearchMode::clustered;
    const WaypointSearch clu = search_waypoint(*lib, &singles, path, count, clustered);
    CHECK(clu.best.library_index == lin.best.library_index);
    CHECK(clu.best.deviation == lin.best.deviation);
  }
}

TEST_CASE("search_waypoint: thread count does not change the result") {
  const LibraryPtr lib = library(600);
  const WaypointPath path = gen_s_curve(8);
  PlannerOptions one;
  PlannerOptions four;
  four.threads = 4;
  const WaypointSearch a = search_waypoint(*lib, nullptr, path, 7, one);
  const WaypointSearch b = search_waypoint(*lib, nullptr, path, 7, four);
  CHECK(a.best.library_index == b.best.library_index);
  CHECK(a.best.deviation == b.best.deviation);
}

TEST_CASE("search_waypoint: empty library and missing clusters") {
  ShapeLibrary empty;
  const WaypointPath path = gen_c_curve(1);
  CHECK_THROWS_AS(search_waypoint(empty, nullptr, path, 3), EmptyLibrary);
  PlannerOptions clustered;
  clustered.mode = SearchMode::clustered;
  CHECK_THROWS(search_waypoint(*library(10), nullptr, path, 3, clustered));
}

TEST_CASE("extra cost hook is added to the deviation") {
  const LibraryPtr lib = library(20);
  const WaypointPath path = gen_c_curve(2);
  PlannerOptions opt;
  opt.extra_cost = [](std::span<const Vec3>, std::span<const Vec3>, const Pose&) { return 0.25; };
  const double plain = evaluate_candidate(lib->shapes[3], 3, path, 5).deviation;
  CHECK(evaluate_candidate(lib->shapes[3], 3, path, 5, opt).deviation == plain + 0.25);
}

TEST_CASE("plan_sparse: three waypoints share the shape found at the third") {
  const LibraryPtr lib = library(200);
  const WaypointPath path({Vec3::Zero(), Vec3(0.2, 0, 0.5), Vec3(0.5, 0.1, 0.9)});
  const SparsePlan plan = plan_sparse(*lib, nullptr, path);
  REQUIRE(plan.size() == 3);
  CHECK(plan.entries[0].config == plan.entries[2].config);
  CHECK(plan.entries[1].config == plan.entries[2].config);
  CHECK_FALSE(plan.entries[0].searched);
  CHECK(plan.entries[2].searched);
  CHECK(plan.entries[0].base_pose.rotation == plan.entries[2].base_pose.rotation);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((plan.entries[i].tip_world().translation - path[i]).norm() < 1e-9);
  }
}

TEST_CASE("plan_sparse: every waypoint tip is exact") {
  const LibraryPtr lib = library(300);
  const ClusteredLibrary c = threshold_cluster(lib, 15.0);
  PlannerOptions opt;
  opt.mode = SearchMode::clustered;
  for (CurveClass cls : kAllCurveClasses) {
    const WaypointPath path = generate_path(PathSpec{cls, 40, 10}, ModelSpec{});
    const SparsePlan plan = plan_sparse(*lib, &c, path, opt);
    REQUIRE(plan.size() == path.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
      REQUIRE((plan.entries[i].tip_world().translation - path[i]).norm() < 1e-9);
    }
    double sum = 0.0;
    for (std::size_t i = 2; i < plan.size(); ++i) sum += plan.entries[i].deviation;
    CHECK(plan.mean_searched_deviation() == doctest::Approx(sum / (plan.size() - 2)));
  }
}

TEST_CASE("plan_sparse: input checks") {
  const LibraryPtr lib = library(10);
  CHECK_THROWS_AS(plan_sparse(*lib, nullptr, WaypointPath({Vec3::Zero(), Vec3(0, 0, 1)})),
                  InputError);
  std::vector<Vec3> many;
  for (int k = 0; k < 70; ++k) many.push_back(Vec3(0, 0, 0.01 * k));
  CHECK_THROWS_AS(plan_sparse(*lib, nullptr, WaypointPath(many)), InputError);
}
