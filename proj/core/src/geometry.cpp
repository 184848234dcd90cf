#include "ftl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ftl/errors.hpp"

namespace ftl {
namespace {

Eigen::Matrix3d skew(const Vec3& v) {
  Eigen::Matrix3d k;
  k << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return k;
}

// Rodrigues without the unit-norm check, for internal callers that already
// normalized.
Rotation rodrigues(const Vec3& unit_axis, double angle) {
  const Eigen::Matrix3d k = skew(unit_axis);
  return Rotation::Identity() + std::sin(angle) * k +
         (1.0 - std::cos(angle)) * (k * k);
}

}  // namespace

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose operator*(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Rotation rotation_from_axis_angle(const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw PreconditionError("rotation_from_axis_angle: axis is not unit length");
  }
  return rodrigues(axis, angle);
}

Rotation rot_x(double angle) { return rodrigues(Vec3::UnitX(), angle); }
Rotation rot_y(double angle) { return rodrigues(Vec3::UnitY(), angle); }

Rotation rot_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Rotation r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Rotation align_vectors(const Vec3& from, const Vec3& to) {
  const double c = from.dot(to);
  const Vec3 cross = from.cross(to);
  const double s = cross.norm();

  if (c <= -1.0 + 1e-9) {
    // Half turn about an axis orthogonal to `from`, then the tiny residual.
    Eigen::Index least = 0;
    from.cwiseAbs().minCoeff(&least);
    const Vec3 axis = from.cross(Vec3::Unit(least)).normalized();
    const Rotation half = rodrigues(axis, std::numbers::pi);
    const Vec3 flipped = half * from;
    const Vec3 rc = flipped.cross(to);
    const double rs = rc.norm();
    if (rs < 1e-12) return half;
    return rodrigues(rc / rs, std::atan2(rs, flipped.dot(to))) * half;
  }
  if (s < 1e-12) return Rotation::Identity();
  return rodrigues(cross / s, std::atan2(s, c));
}

double signed_angle_about_axis(const Vec3& a, const Vec3& b, const Vec3& axis,
                               double eps) {
  const Vec3 pa = a - a.dot(axis) * axis;
  const Vec3 pb = b - b.dot(axis) * axis;
  if (pa.norm() <= eps || pb.norm() <= eps) {
    throw DegenerateProjection("signed_angle_about_axis: projection vanished");
  }
  return std::atan2(axis.dot(pa.cross(pb)), pa.dot(pb));
}

Rotation slerp(const Rotation& from, const Rotation& to, double alpha) {
  if (alpha == 0.0) return from;
  if (alpha == 1.0) return to;
  Eigen::Quaterniond qa(from);
  Eigen::Quaterniond qb(to);
  qa.normalize();
  qb.normalize();
  // Eigen's slerp flips the sign of qb when the dot product is negative.
  return qa.slerp(alpha, qb).normalized().toRotationMatrix();
}

double rotation_angle_between(const Rotation& a, const Rotation& b) {
  const Rotation rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  // acos loses precision near 0; use the vee of the skew part as well.
  const Vec3 w(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
               rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * w.norm(), c);
}

std::vector<Vec3> apply_pose(const Pose& pose, std::span<const Vec3> points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pose.apply(p));
  return out;
}

Rotation rotation_from_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-14) return Rotation::Identity() + skew(rv);
  return rodrigues(rv / angle, angle);
}

Vec3 rotation_to_vector(const Rotation& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.axis() * aa.angle();
}

bool is_rotation(const Rotation& r, double tol) {
  return (r * r.transpose() - Rotation::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace ftl
