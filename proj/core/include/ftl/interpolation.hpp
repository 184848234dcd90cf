#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ftl/forward_model.hpp"
#include "ftl/planner.hpp"
#include "ftl/shape_library.hpp"

namespace ftl {

struct DenseStep {
  Configuration config = Configuration::Zero();
  Pose base_pose;
  Pose desired_tip;
  std::size_t interval = 0;  // 0-based: between waypoints interval and interval + 1
  double alpha = 0.0;
};

/// (n - 1) * h + 1 timed configurations.
struct DensePlan {
  std::vector<DenseStep> steps;
  std::size_t h = 0;

  std::size_t size() const { return steps.size(); }
};

/// Angle theta_j that maximizes alignment of the rotated base x-axis with
/// the reference x-axis: atan2(-x_ref . y_j, x_ref . x_j).
double prealign_angle(const Rotation& reference, const Rotation& base);

/// theta snapped to the nearest multiple of 2*pi/fold.
double snap_angle(double theta, int fold);

/// Library shapes rotated about the base axis so their tips lie in the
/// x-z half plane (x >= 0), clustered with gamma_sym. Used by data-driven
/// symmetry to find rotated variants of a shape.
struct SymmetryIndex {
  double gamma_sym = 0.0;
  std::vector<double> tip_azimuth;
  LibraryPtr aligned;
  ClusteredLibrary clusters;
  std::vector<std::size_t> cluster_of;
};

SymmetryIndex build_symmetry_index(const ShapeLibrary& lib, double gamma_sym);

/// Rotates every sparse entry about its base axis towards the base x-axis of
/// the first entry. Continuous and discrete symmetry rotate the
/// configuration (via the model) and counter-rotate the base so the world
/// shape is unchanged; data-driven symmetry substitutes a tip-aligned
/// cluster mate with a better base orientation. Tips stay on their
/// waypoints. Kind::none returns the plan unchanged.
SparsePlan prealign_radial(const SparsePlan& plan, const SymmetryDescriptor& symmetry,
                           const ForwardModel& model, const ShapeLibrary* lib = nullptr,
                           const SymmetryIndex* index = nullptr);

/// Tip-exact dense interpolation: linear tip position, slerped tip
/// orientation, linear configuration, and base = desired_tip * tip(q)^-1.
/// Performs exactly (n - 1) * h model evaluations.
DensePlan interpolate(const SparsePlan& plan, const WaypointPath& path, std::size_t h,
                      const ForwardModel& model);

/// For every pair of consecutive dense steps, blends configuration and base
/// pose (slerp rotation, linear translation) at beta = m / (samples - 1) and
/// returns the largest tip distance from the straight segment between the
/// two desired tips. One value per inter-step interval.
std::vector<double> inter_step_tip_error(const DensePlan& plan, const ForwardModel& model,
                                         std::size_t beta_samples);

}  // namespace ftl
