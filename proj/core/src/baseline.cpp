#include "ftl/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "ftl/errors.hpp"

namespace ftl {

namespace {

using Eigen::VectorXd;

VectorXd project(const VectorXd& x, const VectorXd& lo, const VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x,
                     double fx, const VectorXd& lo, const VectorXd& hi, double step) {
  VectorXd g(x.size());
  VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Step backwards when the forward probe would leave the box.
    const double h = x[i] + step > hi[i] && x[i] - step >= lo[i] ? -step : step;
    probe[i] = x[i] + h;
    g[i] = (f(probe) - fx) / h;
    probe[i] = x[i];
  }
  return g;
}

VectorXd projected_gradient(const VectorXd& x, const VectorXd& g, const VectorXd& lo,
                            const VectorXd& hi) {
  VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

MinimizeResult minimize_bounded(const std::function<double(const VectorXd&)>& f,
                                const VectorXd& x0, const VectorXd& lo, const VectorXd& hi,
                                const MinimizeOptions& options) {
  if (x0.size() != lo.size() || x0.size() != hi.size()) {
    throw DimensionError("minimize_bounded: dimension mismatch");
  }
  MinimizeResult out;
  VectorXd x = project(x0, lo, hi);
  double fx = f(x);
  out.history.push_back(fx);
  VectorXd g = fd_gradient(f, x, fx, lo, hi, options.fd_step);

  std::deque<VectorXd> s_hist;
  std::deque<VectorXd> y_hist;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    const VectorXd pg = projected_gradient(x, g, lo, hi);
    if (pg.lpNorm<Eigen::Infinity>() <= options.pgtol) {
      out.converged = true;
      break;
    }

    // Two-loop recursion on the projected gradient.
    VectorXd d = pg;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      const double beta = rho * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    d = -d;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (pg[i] == 0.0) d[i] = 0.0;
    }
    if (d.dot(pg) >= 0.0) d = -pg;

    double step = m == 0 ? std::min(1.0, 1.0 / pg.norm()) : 1.0;
    bool accepted = false;
    VectorXd xn;
    double fn = fx;
    for (int ls = 0; ls < 40; ++ls) {
      xn = project(x + step * d, lo, hi);
      const VectorXd delta = xn - x;
      if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
      fn = f(xn);
      if (fn <= fx + 1e-4 * g.dot(delta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled: keep the current iterate

    const VectorXd gn = fd_gradient(f, xn, fn, lo, hi, options.fd_step);
    const VectorXd s = xn - x;
    const VectorXd y = gn - g;
    if (s.dot(y) > 1e-10 * y.squaredNorm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double rel = (fx - fn) / std::max({std::abs(fx), std::abs(fn), 1.0});
    x = xn;
    fx = fn;
    g = gn;
    out.history.push_back(fx);
    ++out.iterations;
    if (rel <= options.ftol) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.f = fx;
  return out;
}

Eigen::Matrix<double, 12, 1> BaselineState::vector() const {
  Eigen::Matrix<double, 12, 1> z;
  z << q, t, r;
  return z;
}

BaselineState BaselineState::from_vector(const Eigen::Matrix<double, 12, 1>& z) {
  BaselineState s;
  s.q = z.head<6>();
  s.t = z.segment<3>(6);
  s.r = z.tail<3>();
  return s;
}

double baseline_cost(const BaselineState& z, const WaypointPath& path, std::size_t count,
                     const ForwardModel& model, const BaselineOptions& options) {
  if (count < 1 || count > path.size()) throw PreconditionError("baseline_cost: bad prefix");
  const Shape shape = model.shape(z.q);
  const Pose pose = z.base_pose();
  const int m_star =
      count == 1 ? shape.intervals() : active_subset(shape, path.cumulative_arclen()[count - 1]);
  thread_local std::vector<Vec3> active;
  active.clear();
  for (std::size_t j = static_cast<std::size_t>(m_star); j < shape.points().size(); ++j) {
    active.push_back(pose.apply(shape.points()[j]));
  }
  const double chamfer = shape_deviation(active, path.prefix(count), options.normalization);
  const double tip_err = (active.back() - path[count - 1]).squaredNorm();
  return chamfer + options.lambda_tip * tip_err;
}

BaselineState optimize_waypoint(const WaypointPath& path, std::size_t count,
                                const BaselineState& warm_start, const ForwardModel& model,
                                const BaselineOptions& options) {
  if (count < 1 || count > path.size()) throw PreconditionError("optimize_waypoint: i >= 1");
  const Bounds box = model.sampling_bounds();
  const double inf = std::numeric_limits<double>::infinity();
  VectorXd lo = VectorXd::Constant(12, -inf);
  VectorXd hi = VectorXd::Constant(12, inf);
  lo.head<6>() = box.lo;
  hi.head<6>() = box.hi;

  const auto cost = [&](const VectorXd& z) {
    return baseline_cost(BaselineState::from_vector(z), path, count, model, options);
  };
  const MinimizeResult res = minimize_bounded(cost, warm_start.vector(), lo, hi, options.solver);

  BaselineState out = BaselineState::from_vector(res.x);
  out.cost = res.f;
  out.converged = res.converged;
  out.iterations = res.iterations;
  out.cost_history = res.history;
  return out;
}

BaselinePlan plan_baseline(const WaypointPath& path, const ForwardModel& model, std::size_t h,
                           const BaselineOptions& options) {
  if (path.size() < 1) throw InputError("plan_baseline: empty path");
  if (h < 1) throw PreconditionError("plan_baseline: h must be >= 1");

  BaselinePlan plan;
  BaselineState warm;
  for (std::size_t count = 1; count <= path.size(); ++count) {
    BaselineState s = optimize_waypoint(path, count, warm, model, options);
    // Re-chart the rotation vector between waypoints so |r| stays below pi.
    if (s.r.norm() >= std::numbers::pi) s.r = rotation_to_vector(rotation_from_vector(s.r));
    plan.states.push_back(s);
    warm = s;
    warm.cost_history.clear();
  }

  std::vector<Pose> bases;
  std::vector<Rotation> tip_rot;
  for (const auto& s : plan.states) {
    bases.push_back(s.base_pose());
    tip_rot.push_back(bases.back().rotation * model.tip_pose(s.q).rotation);
  }

  DensePlan& dense = plan.dense;
  dense.h = h;
  DenseStep first;
  first.config = plan.states[0].q;
  first.base_pose = bases[0];
  first.desired_tip = Pose{tip_rot[0], path[0]};
  dense.steps.push_back(first);
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    for (std::size_t k = 1; k <= h; ++k) {
      const double alpha = static_cast<double>(k) / static_cast<double>(h);
      DenseStep step;
      step.interval = j;
      step.alpha = alpha;
      step.config = (1.0 - alpha) * plan.states[j].q + alpha * plan.states[j + 1].q;
      step.base_pose.rotation = slerp(bases[j].rotation, bases[j + 1].rotation, alpha);
      step.base_pose.translation =
          (1.0 - alpha) * bases[j].translation + alpha * bases[j + 1].translation;
      step.desired_tip.translation = (1.0 - alpha) * path[j] + alpha * path[j + 1];
      step.desired_tip.rotation = slerp(tip_rot[j], tip_rot[j + 1], alpha);
      dense.steps.push_back(step);
    }
  }
  return plan;
}

}  // namespace ftl
