#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ftl {

using Vec3 = Eigen::Vector3d;
/// Orthonormal 3x3 matrix with det = +1. Stored as a matrix; quaternions are
/// only used inside slerp.
using Rotation = Eigen::Matrix3d;

/// Rigid transform x -> R x + t.
struct Pose {
  Rotation rotation = Rotation::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const;

  friend Pose operator*(const Pose& a, const Pose& b);
};

/// R = I + sin(angle)[axis]x + (1 - cos(angle))[axis]x^2.
/// Throws PreconditionError unless |axis| = 1 within 1e-9.
Rotation rotation_from_axis_angle(const Vec3& axis, double angle);

Rotation rot_x(double angle);
Rotation rot_y(double angle);
Rotation rot_z(double angle);

/// Rotation taking unit vector `from` onto unit vector `to` about from x to.
///
/// Near-parallel inputs (|from x to| < 1e-12, positive dot) give the
/// identity. Antipodal inputs (from . to <= -1 + 1e-9) use a half turn about
/// from x e, where e is the basis vector least parallel to `from`, followed by
/// the small residual alignment so that R from = to still holds.
Rotation align_vectors(const Vec3& from, const Vec3& to);

/// Angle that rotates the projection of `a` onto the plane orthogonal to
/// `axis` onto the projection of `b`, positive counter-clockwise about `axis`.
/// Throws DegenerateProjection when either projection has norm <= eps.
double signed_angle_about_axis(const Vec3& a, const Vec3& b, const Vec3& axis,
                               double eps = 1e-12);

/// Shortest-geodesic interpolation; alpha = 0 and alpha = 1 return the
/// endpoints bit-for-bit.
Rotation slerp(const Rotation& from, const Rotation& to, double alpha);

/// Geodesic angle between two rotations in [0, pi].
double rotation_angle_between(const Rotation& a, const Rotation& b);

std::vector<Vec3> apply_pose(const Pose& pose, std::span<const Vec3> points);

/// Rotation vector (axis * angle) <-> matrix.
Rotation rotation_from_vector(const Vec3& rv);
Vec3 rotation_to_vector(const Rotation& r);

bool is_rotation(const Rotation& r, double tol = 1e-9);

}  // namespace ftl
