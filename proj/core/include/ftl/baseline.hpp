#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ftl/forward_model.hpp"
#include "ftl/interpolation.hpp"
#include "ftl/planner.hpp"

namespace ftl {

/// Settings of the box-constrained quasi-Newton solver.
struct MinimizeOptions {
  int max_iters = 200;
  int memory = 10;
  double fd_step = 1e-6;
  double pgtol = 1e-5;   // stop when the projected gradient inf-norm is below
  double ftol = 2.2e-9;  // stop when the relative decrease is below
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // cost after every accepted iterate, starting with f(x0)
};

/// Projected limited-memory BFGS with forward-difference gradients and an
/// Armijo backtracking line search. Entries with lo = -inf / hi = +inf are
/// unbounded. Accepted iterates never increase the cost.
MinimizeResult minimize_bounded(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, const MinimizeOptions& options = {});

struct BaselineOptions {
  double lambda_tip = 10.0;
  MinimizeOptions solver;
  ChamferNormalization normalization = ChamferNormalization::cardinality;
};

/// z = (q, base translation t, base rotation vector r).
struct BaselineState {
  Configuration q = Configuration::Zero();
  Vec3 t = Vec3::Zero();
  Vec3 r = Vec3::Zero();
  double cost = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<double> cost_history;

  Pose base_pose() const { return Pose{rotation_from_vector(r), t}; }
  Eigen::Matrix<double, 12, 1> vector() const;
  static BaselineState from_vector(const Eigen::Matrix<double, 12, 1>& z);
};

/// Chamfer distance between the posed active shape and the first `count`
/// waypoints plus lambda_tip * |tip - w_count|^2.
double baseline_cost(const BaselineState& z, const WaypointPath& path, std::size_t count,
                     const ForwardModel& model, const BaselineOptions& options = {});

/// Local minimization from `warm_start`. q is kept inside the model's
/// sampling box. A run that hits max_iters returns its best iterate with
/// converged = false.
BaselineState optimize_waypoint(const WaypointPath& path, std::size_t count,
                                const BaselineState& warm_start, const ForwardModel& model,
                                const BaselineOptions& options = {});

struct BaselinePlan {
  std::vector<BaselineState> states;  // one per waypoint
  DensePlan dense;
};

/// Solves the waypoints in order, each warm-started from the previous one
/// (the first from z = 0), then densifies with linear configuration,
/// slerped base rotation and linear base translation. There is no tip
/// correction, so the tip drifts off the path between and at waypoints.
BaselinePlan plan_baseline(const WaypointPath& path, const ForwardModel& model, std::size_t h,
                           const BaselineOptions& options = {});

}  // namespace ftl
