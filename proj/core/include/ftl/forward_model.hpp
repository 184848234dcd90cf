#pragma once

#include <atomic>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ftl/geometry.hpp"

namespace ftl {

inline constexpr int kConfigDim = 6;

/// Two bending components (kx, ky) per segment, three segments.
using Configuration = Eigen::Matrix<double, kConfigDim, 1>;

/// How a robot's shape behaves under rotation about its base axis.
struct SymmetryDescriptor {
  enum class Kind { none, continuous, discrete, data_driven };

  Kind kind = Kind::continuous;
  int fold = 0;           // discrete only, >= 2
  double gamma_sym = 0.0;  // data_driven only, >= 0

  static SymmetryDescriptor none() { return {Kind::none, 0, 0.0}; }
  static SymmetryDescriptor continuous() { return {Kind::continuous, 0, 0.0}; }
  static SymmetryDescriptor discrete(int k);
  static SymmetryDescriptor data_driven(double gamma_sym);

  /// "none", "continuous", "discrete:3", "data-driven:0.5".
  std::string to_string() const;
  static SymmetryDescriptor parse(const std::string& text);

  friend bool operator==(const SymmetryDescriptor&, const SymmetryDescriptor&) = default;
};

/// Piece-wise constant curvature robot description.
struct ModelSpec {
  int segment_count = 3;
  double segment_length = 1.0;
  int intervals = 60;  // D: the backbone has D + 1 points
  double kappa_max = std::numbers::pi / 2.0;
  SymmetryDescriptor symmetry = SymmetryDescriptor::continuous();

  double nominal_length() const { return segment_count * segment_length; }
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Axis-aligned box over configuration components.
struct Bounds {
  Configuration lo = Configuration::Zero();
  Configuration hi = Configuration::Zero();

  static Bounds symmetric(double half_width);
  bool contains(const Configuration& q, double tol = 0.0) const;
  bool empty() const { return ((hi - lo).array() < 0.0).any(); }
  Configuration clamp(const Configuration& q) const;
};

/// Discretized backbone in the robot base frame, p_0 at the origin.
class Shape {
 public:
  Shape() = default;
  Shape(Configuration config, std::vector<Vec3> points, Rotation tip_rotation);

  const Configuration& config() const { return config_; }
  const std::vector<Vec3>& points() const { return points_; }
  const Rotation& tip_rotation() const { return tip_rotation_; }
  /// Cumulative polyline length; arclen()[j] is the length from p_0 to p_j.
  const std::vector<double>& arclen() const { return arclen_; }

  int intervals() const { return static_cast<int>(points_.size()) - 1; }
  const Vec3& tip() const { return points_.back(); }
  double length() const { return arclen_.back(); }
  Pose tip_pose() const { return Pose{tip_rotation_, points_.back()}; }

 private:
  Configuration config_ = Configuration::Zero();
  std::vector<Vec3> points_;
  Rotation tip_rotation_ = Rotation::Identity();
  std::vector<double> arclen_;
};

/// Anything that maps configurations to discretized backbones can drive the
/// planner. Implementations must be deterministic and thread-safe.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual Shape shape(const Configuration& q) const = 0;
  virtual Pose tip_pose(const Configuration& q) const;

  virtual SymmetryDescriptor symmetry() const = 0;
  virtual double nominal_length() const = 0;
  virtual int intervals() const = 0;
  /// Box that library generation samples from.
  virtual Bounds sampling_bounds() const = 0;
  virtual bool in_domain(const Configuration& q) const = 0;

  /// Configuration whose shape is rot_z(angle) applied to shape(q). Models
  /// without analytic radial symmetry throw PreconditionError.
  virtual Configuration rotate_about_base(const Configuration& q, double angle) const;
};

/// Three constant-curvature arcs joined with tangent continuity. Each
/// segment bends with curvature |(kx, ky)| towards direction atan2(ky, kx) of
/// the frame left by the previous segment.
class PccModel final : public ForwardModel {
 public:
  explicit PccModel(ModelSpec spec = {});

  const ModelSpec& spec() const { return spec_; }

  Shape shape(const Configuration& q) const override;
  Pose tip_pose(const Configuration& q) const override;
  SymmetryDescriptor symmetry() const override { return spec_.symmetry; }
  double nominal_length() const override { return spec_.nominal_length(); }
  int intervals() const override { return spec_.intervals; }
  Bounds sampling_bounds() const override;
  /// Per-segment curvature magnitude <= sqrt(2) * kappa_max: the rotation
  /// invariant hull of the sampling box.
  bool in_domain(const Configuration& q) const override;
  Configuration rotate_about_base(const Configuration& q, double angle) const override;

 private:
  ModelSpec spec_;
};

Shape pcc_forward(const ModelSpec& spec, const Configuration& q);
Pose tip_pose(const ModelSpec& spec, const Configuration& q);

/// Wraps a model and counts shape()/tip_pose() evaluations.
class CountingModel final : public ForwardModel {
 public:
  explicit CountingModel(const ForwardModel& inner) : inner_(inner) {}

  Shape shape(const Configuration& q) const override;
  Pose tip_pose(const Configuration& q) const override;
  SymmetryDescriptor symmetry() const override { return inner_.symmetry(); }
  double nominal_length() const override { return inner_.nominal_length(); }
  int intervals() const override { return inner_.intervals(); }
  Bounds sampling_bounds() const override { return inner_.sampling_bounds(); }
  bool in_domain(const Configuration& q) const override { return inner_.in_domain(q); }
  Configuration rotate_about_base(const Configuration& q, double angle) const override {
    return inner_.rotate_about_base(q, angle);
  }

  long evaluations() const { return count_.load(); }
  void reset() { count_ = 0; }

 private:
  const ForwardModel& inner_;
  mutable std::atomic<long> count_{0};
};

}  // namespace ftl
