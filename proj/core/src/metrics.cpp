#include <algorithm>

#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"

namespace ftl {

std::vector<Vec3> active_path_at(const WaypointPath& path, std::size_t interval, double alpha) {
  const std::size_t n = path.size();
  if (n == 0 || interval >= std::max<std::size_t>(n - 1, 1)) {
    throw ConsistencyError("active_path_at: interval out of range");
  }
  const auto& cum = path.cumulative_arclen();
  if (n == 1) return {path[0]};
  const double s = cum[interval] + alpha * (cum[interval + 1] - cum[interval]);
  const double tol = 1e-12 * std::max(1.0, path.total_length());

  std::vector<Vec3> out;
  for (std::size_t k = 0; k < n && cum[k] <= s + tol; ++k) out.push_back(path[k]);
  if (alpha > 0.0 && alpha < 1.0) {
    out.push_back((1.0 - alpha) * path[interval] + alpha * path[interval + 1]);
  }
  return out;
}

Metrics eval_plan(const DensePlan& plan, const WaypointPath& path, const ForwardModel& model,
                  ChamferNormalization normalization) {
  const std::size_t n = path.size();
  if (n == 0) throw ConsistencyError("eval_plan: empty path");
  const std::size_t expected = (n - 1) * plan.h + 1;
  if (plan.h < 1 || plan.steps.size() != expected) {
    throw ConsistencyError("eval_plan: plan has " + std::to_string(plan.steps.size()) +
                           " steps, path needs " + std::to_string(expected));
  }

  const double length = model.nominal_length();
  Metrics m;
  m.step_shape_dev.reserve(plan.steps.size());
  double sum = 0.0;
  for (const DenseStep& step : plan.steps) {
    if (n > 1 && step.interval + 1 >= n) throw ConsistencyError("eval_plan: step interval");
    const std::size_t j = step.interval;
    const Vec3 desired =
        n == 1 ? path[0] : Vec3((1.0 - step.alpha) * path[j] + step.alpha * path[j + 1]);

    const Shape shape = model.shape(step.config);
    const std::vector<Vec3> world = apply_pose(step.base_pose, shape.points());
    m.max_tip_error = std::max(m.max_tip_error, (world.back() - desired).norm());

    const std::vector<Vec3> active_path = active_path_at(path, j, step.alpha);
    std::span<const Vec3> active;
    if (active_path.size() < 2) {
      active = std::span<const Vec3>(world).last(1);
    } else {
      double target = 0.0;
      for (std::size_t k = 1; k < active_path.size(); ++k) {
        target += (active_path[k] - active_path[k - 1]).norm();
      }
      const int m_star = active_subset(shape, target);
      active = std::span<const Vec3>(world).subspan(static_cast<std::size_t>(m_star));
    }
    const double dev = shape_deviation(active_path, active, normalization);
    m.step_shape_dev.push_back(dev);
    sum += dev;
  }
  m.tip_dev_pct = 100.0 * m.max_tip_error / length;
  m.shape_dev_pct = 100.0 * sum / static_cast<double>(plan.steps.size()) / length;
  return m;
}

}  // namespace ftl
