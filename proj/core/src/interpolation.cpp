#include "ftl/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ftl/errors.hpp"

namespace ftl {

double prealign_angle(const Rotation& reference, const Rotation& base) {
  const Vec3 x_ref = reference.col(0);
  return std::atan2(-x_ref.dot(base.col(1)), x_ref.dot(base.col(0)));
}

double snap_angle(double theta, int fold) {
  if (fold < 2) throw PreconditionError("snap_angle: fold must be >= 2");
  const double step = 2.0 * std::numbers::pi / fold;
  return std::round(theta / step) * step;
}

namespace {

double tip_azimuth(const Shape& s) {
  const Vec3& tip = s.tip();
  if (tip.x() == 0.0 && tip.y() == 0.0) return 0.0;
  return std::atan2(tip.y(), tip.x());
}

}  // namespace

SymmetryIndex build_symmetry_index(const ShapeLibrary& lib, double gamma_sym) {
  if (!(gamma_sym >= 0.0)) throw PreconditionError("gamma_sym must be >= 0");
  SymmetryIndex index;
  index.gamma_sym = gamma_sym;

  auto aligned = std::make_shared<ShapeLibrary>();
  aligned->spec = lib.spec;
  aligned->seed = lib.seed;
  aligned->bounds = lib.bounds;
  aligned->shapes.reserve(lib.size());
  index.tip_azimuth.reserve(lib.size());
  for (const auto& s : lib.shapes) {
    const double a = tip_azimuth(s);
    const Rotation undo = rot_z(-a);
    std::vector<Vec3> pts;
    pts.reserve(s.points().size());
    for (const auto& p : s.points()) pts.push_back(undo * p);
    aligned->shapes.emplace_back(s.config(), std::move(pts), undo * s.tip_rotation());
    index.tip_azimuth.push_back(a);
  }
  index.aligned = aligned;
  index.clusters = threshold_cluster(aligned, gamma_sym);
  index.cluster_of.assign(lib.size(), 0);
  for (std::size_t c = 0; c < index.clusters.clusters.size(); ++c) {
    for (std::size_t m : index.clusters.clusters[c].members) index.cluster_of[m] = c;
  }
  return index;
}

SparsePlan prealign_radial(const SparsePlan& plan, const SymmetryDescriptor& symmetry,
                           const ForwardModel& model, const ShapeLibrary* lib,
                           const SymmetryIndex* index) {
  if (plan.entries.empty()) throw PreconditionError("prealign_radial: empty plan");
  SparsePlan out = plan;
  if (symmetry.kind == SymmetryDescriptor::Kind::none) return out;

  const Rotation reference = plan.entries.front().base_pose.rotation;
  const Vec3 x_ref = reference.col(0);

  if (symmetry.kind == SymmetryDescriptor::Kind::data_driven) {
    if (lib == nullptr || index == nullptr) {
      throw PreconditionError("data-driven symmetry needs the library and its symmetry index");
    }
    for (auto& e : out.entries) {
      const std::size_t self = e.library_index;
      const Vec3 tip = e.tip_world().translation;
      const Cluster& cluster = index->clusters.clusters[index->cluster_of[self]];
      std::size_t best = self;
      Rotation best_rot = e.base_pose.rotation;
      double best_score = x_ref.dot(best_rot.col(0));
      for (std::size_t m : cluster.members) {
        if (m == self) continue;
        if (shape_similarity_bounded(index->aligned->shapes[m], index->aligned->shapes[self],
                                     index->gamma_sym) > index->gamma_sym) {
          continue;
        }
        const Rotation r = e.base_pose.rotation *
                           rot_z(index->tip_azimuth[self] - index->tip_azimuth[m]);
        const double score = x_ref.dot(r.col(0));
        if (score > best_score) {
          best_score = score;
          best = m;
          best_rot = r;
        }
      }
      if (best == self) continue;
      const Shape& sub = lib->shapes[best];
      e.config = sub.config();
      e.library_index = best;
      e.tip_local = sub.tip_pose();
      e.base_pose.rotation = best_rot;
      e.base_pose.translation = tip - best_rot * sub.tip();
    }
    return out;
  }

  // Entry 0 is the reference; its angle is zero by definition.
  for (std::size_t i = 1; i < out.entries.size(); ++i) {
    SparseEntry& e = out.entries[i];
    double theta = prealign_angle(reference, e.base_pose.rotation);
    if (symmetry.kind == SymmetryDescriptor::Kind::discrete) theta = snap_angle(theta, symmetry.fold);
    if (theta == 0.0) continue;
    const Vec3 tip = e.tip_world().translation;
    e.config = model.rotate_about_base(e.config, theta);
    e.tip_local = model.tip_pose(e.config);
    e.base_pose.rotation = e.base_pose.rotation * rot_z(-theta);
    e.base_pose.translation = tip - e.base_pose.rotation * e.tip_local.translation;
  }
  return out;
}

DensePlan interpolate(const SparsePlan& plan, const WaypointPath& path, std::size_t h,
                      const ForwardModel& model) {
  if (h < 1) throw PreconditionError("interpolate: h must be >= 1");
  const std::size_t n = plan.entries.size();
  if (n == 0 || path.size() != n) throw ConsistencyError("interpolate: plan/path size mismatch");

  DensePlan dense;
  dense.h = h;
  dense.steps.reserve((n - 1) * h + 1);

  const SparseEntry& first = plan.entries.front();
  DenseStep start;
  start.config = first.config;
  start.base_pose = first.base_pose;
  start.desired_tip = Pose{first.tip_world().rotation, path[0]};
  dense.steps.push_back(start);

  for (std::size_t j = 0; j + 1 < n; ++j) {
    const SparseEntry& a = plan.entries[j];
    const SparseEntry& b = plan.entries[j + 1];
    const Rotation ra = a.tip_world().rotation;
    const Rotation rb = b.tip_world().rotation;
    for (std::size_t k = 1; k <= h; ++k) {
      const double alpha = static_cast<double>(k) / static_cast<double>(h);
      DenseStep step;
      step.interval = j;
      step.alpha = alpha;
      step.desired_tip.translation = (1.0 - alpha) * path[j] + alpha * path[j + 1];
      step.desired_tip.rotation = slerp(ra, rb, alpha);
      step.config = (1.0 - alpha) * a.config + alpha * b.config;
      const Pose tip_local = model.tip_pose(step.config);
      step.base_pose = step.desired_tip * tip_local.inverse();
      // Re-anchor the translation so the tip lands on the target to rounding.
      step.base_pose.translation =
          step.desired_tip.translation - step.base_pose.rotation * tip_local.translation;
      dense.steps.push_back(step);
    }
  }
  return dense;
}

std::vector<double> inter_step_tip_error(const DensePlan& plan, const ForwardModel& model,
                                         std::size_t beta_samples) {
  if (beta_samples < 3) throw PreconditionError("inter_step_tip_error: need >= 3 samples");
  std::vector<double> out;
  if (plan.steps.size() < 2) return out;
  out.reserve(plan.steps.size() - 1);
  for (std::size_t k = 0; k + 1 < plan.steps.size(); ++k) {
    const DenseStep& a = plan.steps[k];
    const DenseStep& b = plan.steps[k + 1];
    double worst = 0.0;
    for (std::size_t m = 0; m < beta_samples; ++m) {
      const double beta = static_cast<double>(m) / static_cast<double>(beta_samples - 1);
      const Configuration q = (1.0 - beta) * a.config + beta * b.config;
      const Rotation r = slerp(a.base_pose.rotation, b.base_pose.rotation, beta);
      const Vec3 t = (1.0 - beta) * a.base_pose.translation + beta * b.base_pose.translation;
      const Vec3 tip = r * model.tip_pose(q).translation + t;
      const Vec3 ftl =
          (1.0 - beta) * a.desired_tip.translation + beta * b.desired_tip.translation;
      worst = std::max(worst, (tip - ftl).norm());
    }
    out.push_back(worst);
  }
  return out;
}

}  // namespace ftl
