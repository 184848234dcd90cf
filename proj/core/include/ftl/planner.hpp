#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ftl/forward_model.hpp"
#include "ftl/geometry.hpp"
#include "ftl/shape_library.hpp"

namespace ftl {

/// Ordered 3D waypoints with cumulative polyline arc length.
class WaypointPath {
 public:
  WaypointPath() = default;
  /// Throws InputError for an empty list, non-finite coordinates or repeated
  /// consecutive waypoints.
  explicit WaypointPath(std::vector<Vec3> waypoints);

  std::size_t size() const { return waypoints_.size(); }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }
  const std::vector<double>& cumulative_arclen() const { return cumulative_; }
  double total_length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const Vec3& operator[](std::size_t k) const { return waypoints_[k]; }

  /// First `count` waypoints (the active path when the tip is at w_count).
  std::span<const Vec3> prefix(std::size_t count) const {
    return std::span<const Vec3>(waypoints_).first(count);
  }

 private:
  std::vector<Vec3> waypoints_;
  std::vector<double> cumulative_;
};

enum class SearchMode { linear, clustered };

/// How the two Chamfer terms are averaged. `cardinality` divides by the
/// number of points; `arc_length` by each polyline's length.
enum class ChamferNormalization { cardinality, arc_length };

/// Optional additive cost term: (aligned active shape, active waypoints,
/// base pose) -> cost. Weighting or penalty terms plug in here.
using CostHook =
    std::function<double(std::span<const Vec3>, std::span<const Vec3>, const Pose&)>;

struct PlannerOptions {
  SearchMode mode = SearchMode::linear;
  ChamferNormalization normalization = ChamferNormalization::cardinality;
  unsigned threads = 1;
  CostHook extra_cost;
};

/// Index m* where the distal subset p_m..p_D best matches `target_arclen`.
/// Ties go to the smaller m (longer subset).
int active_subset(const Shape& shape, double target_arclen);

struct Alignment {
  Pose base_pose;
  bool t3_skipped = false;  // collinear active path or degenerate projection
  std::vector<Vec3> aligned_points;  // all D + 1 points in the world frame
};

/// Translation to the tip waypoint, rotation about it to align the
/// active chord with the path chord, then roll about the path chord to match
/// the waypoint farthest from it. `count` is the number of active waypoints.
Alignment align_base_pose(const Shape& shape, int m_star, const WaypointPath& path,
                          std::size_t count);

/// Symmetric Chamfer distance: mean nearest distance from each point of
/// `a` to `b` plus the same from `b` to `a`.
double shape_deviation(std::span<const Vec3> a, std::span<const Vec3> b,
                       ChamferNormalization normalization = ChamferNormalization::cardinality);

struct AlignedCandidate {
  std::size_t library_index = 0;
  Pose base_pose;
  int m_star = 0;
  double deviation = 0.0;
  bool t3_skipped = false;
};

/// Active subset + alignment + deviation of one library shape against the
/// first `count` waypoints.
AlignedCandidate evaluate_candidate(const Shape& shape, std::size_t library_index,
                                    const WaypointPath& path, std::size_t count,
                                    const PlannerOptions& options = {});

struct WaypointSearch {
  AlignedCandidate best;
  std::size_t evaluations = 0;
};

/// Best-matching library shape for the active path W_count. Linear mode
/// scans every shape; clustered mode uses the two-pass search and needs
/// `clusters`. Throws EmptyLibrary.
WaypointSearch search_waypoint(const ShapeLibrary& lib, const ClusteredLibrary* clusters,
                               const WaypointPath& path, std::size_t count,
                               const PlannerOptions& options = {});

struct SparseEntry {
  Configuration config = Configuration::Zero();
  Pose base_pose;
  int m_star = 0;
  double deviation = 0.0;
  std::size_t library_index = 0;
  Pose tip_local;  // tip pose in the robot base frame
  bool searched = false;  // false for the first two waypoints

  Pose tip_world() const { return base_pose * tip_local; }
};

struct SparsePlan {
  std::vector<SparseEntry> entries;
  std::size_t evaluations = 0;

  std::size_t size() const { return entries.size(); }
  /// Mean deviation over the searched entries (waypoints 3..n).
  double mean_searched_deviation() const;
};

/// One configuration per waypoint. Waypoints 3..n are searched; waypoints 1
/// and 2 reuse the shape found at w_3, translated so the tip lands on them.
/// Throws InputError for n < 3 or D <= n.
SparsePlan plan_sparse(const ShapeLibrary& lib, const ClusteredLibrary* clusters,
                       const WaypointPath& path, const PlannerOptions& options = {});

}  // namespace ftl
