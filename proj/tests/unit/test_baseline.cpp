#include <doctest.h>

#include <cmath>

#include "ftl/baseline.hpp"
#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"
#include "support.hpp"

using namespace ftl;
using Eigen::VectorXd;

namespace {

VectorXd unbounded(Eigen::Index n, double sign) {
  return VectorXd::Constant(n, sign * std::numeric_limits<double>::infinity());
}

void check_nonincreasing(const std::vector<double>& h) {
  for (std::size_t k = 1; k < h.size(); ++k) REQUIRE(h[k] <= h[k - 1]);
}

}  // namespace

TEST_CASE("minimize_bounded: Rosenbrock from the classic start") {
  const auto rosen = [](const VectorXd& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  MinimizeOptions opt;
  opt.max_iters = 1000;
  const MinimizeResult r =
      minimize_bounded(rosen, VectorXd::Map(std::vector<double>{-1.2, 1.0}.data(), 2),
                       unbounded(2, -1), unbounded(2, 1), opt);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-3);
  CHECK(std::abs(r.x[1] - 1.0) < 2e-3);
  CHECK(r.f < 1e-6);
  check_nonincreasing(r.history);
}

TEST_CASE("minimize_bounded: active upper bound") {
  const auto f = [](const VectorXd& x) { return std::pow(x[0] - 2.0, 2) + std::pow(x[1] + 0.5, 2); };
  VectorXd lo(2), hi(2), x0(2);
  lo << -1, -1;
  hi << 1, 1;
  x0 << 0, 0;
  const MinimizeResult r = minimize_bounded(f, x0, lo, hi);
  CHECK(r.x[0] == 1.0);
  CHECK(std::abs(r.x[1] + 0.5) < 1e-5);
  CHECK(r.converged);
  check_nonincreasing(r.history);
}

TEST_CASE("minimize_bounded: iteration cap returns the best iterate unconverged") {
  const auto f = [](const VectorXd& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  MinimizeOptions opt;
  opt.max_iters = 3;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const MinimizeResult r = minimize_bounded(f, x0, unbounded(2, -1), unbounded(2, 1), opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 3);
  CHECK(r.f == r.history.back());
  CHECK(r.f < f(x0));
}

TEST_CASE("minimize_bounded: dimension mismatch throws") {
  const auto f = [](const VectorXd& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS(minimize_bounded(f, VectorXd::Zero(2), VectorXd::Zero(3), VectorXd::Zero(2)),
                  DimensionError);
}

TEST_CASE("baseline state vector round trip") {
  BaselineState s;
  s.q << 0.1, -0.2, 0.3, -0.4, 0.5, -0.6;
  s.t = Vec3(1, 2, 3);
  s.r = Vec3(0.2, -0.1, 0.4);
  const BaselineState back = BaselineState::from_vector(s.vector());
  CHECK(back.q == s.q);
  CHECK(back.t == s.t);
  CHECK(back.r == s.r);
}

TEST_CASE("baseline_cost: hand evaluation with a single active point") {
  const WaypointPath path({Vec3(0, 0, 3), Vec3(0, 0, 4)});
  const PccModel model;
  BaselineState z;
  CHECK(baseline_cost(z, path, 1, model) == 0.0);
  z.t = Vec3(1, 0, 0);
  // Chamfer of two single points 1 apart is 2; tip penalty 10 * 1^2.
  CHECK(baseline_cost(z, path, 1, model) == doctest::Approx(12.0));
  BaselineOptions opt;
  opt.lambda_tip = 0.0;
  CHECK(baseline_cost(z, path, 1, model, opt) == doctest::Approx(2.0));
}

TEST_CASE("optimize_waypoint: exactly realizable path stays at the warm start") {
  const PccModel model;
  BaselineState warm;
  warm.q << 0.5, -0.2, 0.3, 0.6, -0.4, 0.1;
  const WaypointPath path(model.shape(warm.q).points());
  REQUIRE(baseline_cost(warm, path, path.size(), model) < 1e-12);
  const BaselineState s = optimize_waypoint(path, path.size(), warm, model);
  CHECK(s.cost < 1e-12);
  CHECK((s.vector() - warm.vector()).norm() < 1e-6);
}

TEST_CASE("optimize_waypoint: first waypoint from the zero start") {
  // Oracle: a coarse lattice over the base translation with q = 0 and r = 0;
  // its best point puts the straight robot's tip on w_1 at zero cost.
  const PccModel model;
  const WaypointPath path = gen_c_curve(3);
  double lattice_best = 1e300;
  for (double x = -4; x <= 4; x += 0.5) {
    for (double y = -4; y <= 4; y += 0.5) {
      for (double z = -4; z <= 4; z += 0.5) {
        BaselineState s;
        s.t = Vec3(x, y, z);
        lattice_best = std::min(lattice_best, baseline_cost(s, path, 1, model));
      }
    }
  }
  const BaselineState s = optimize_waypoint(path, 1, BaselineState{}, model);
  // With one point the Chamfer term is 2|tip - w|, a cone: forward differences
  // resolve its apex only to a few fd steps.
  CHECK(s.cost <= lattice_best + 10.0 * MinimizeOptions{}.fd_step);
  CHECK((s.base_pose().apply(model.tip_pose(s.q).translation) - path[0]).norm() < 1e-3);
  CHECK(s.q.cwiseAbs().maxCoeff() < 0.1);
  check_nonincreasing(s.cost_history);
}

TEST_CASE("plan_baseline: single waypoint, determinism and cost monotonicity") {
  const PccModel model;
  const BaselinePlan one = plan_baseline(WaypointPath({Vec3::Zero()}), model, 10);
  CHECK(one.states.size() == 1);
  CHECK(one.dense.size() == 1);

  const WaypointPath path = gen_s_curve(12);
  const BaselinePlan a = plan_baseline(path, model, 5);
  const BaselinePlan b = plan_baseline(path, model, 5);
  REQUIRE(a.states.size() == path.size());
  REQUIRE(a.dense.size() == (path.size() - 1) * 5 + 1);
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i].vector() == b.states[i].vector());
    CHECK(a.states[i].r.norm() < std::numbers::pi);
    check_nonincreasing(a.states[i].cost_history);
    CHECK(a.states[i].q.cwiseAbs().maxCoeff() <= model.spec().kappa_max);
  }
  for (std::size_t k = 0; k < a.dense.size(); ++k) {
    CHECK(a.dense.steps[k].config == b.dense.steps[k].config);
  }
}

TEST_CASE("plan_baseline: dense endpoints reproduce the waypoint solutions") {
  const PccModel model;
  const WaypointPath path = gen_robot_curve(4, ModelSpec{});
  const BaselinePlan plan = plan_baseline(path, model, 4);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const DenseStep& s = plan.dense.steps[i * 4];
    CHECK(s.config == plan.states[i].q);
    CHECK((s.base_pose.translation - plan.states[i].t).norm() < 1e-12);
    CHECK(s.desired_tip.translation == path[i]);
  }
}
