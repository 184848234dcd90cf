#include "ftl/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ftl/errors.hpp"

namespace ftl {

SymmetryDescriptor SymmetryDescriptor::discrete(int k) {
  if (k < 2) throw PreconditionError("discrete symmetry needs fold >= 2");
  return {Kind::discrete, k, 0.0};
}

SymmetryDescriptor SymmetryDescriptor::data_driven(double gamma_sym) {
  if (!(gamma_sym >= 0.0)) throw PreconditionError("data-driven symmetry needs gamma_sym >= 0");
  return {Kind::data_driven, 0, gamma_sym};
}

std::string SymmetryDescriptor::to_string() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::continuous: return "continuous";
    case Kind::discrete: return "discrete:" + std::to_string(fold);
    case Kind::data_driven: {
      std::ostringstream os;
      os.precision(17);
      os << "data-driven:" << gamma_sym;
      return os.str();
    }
  }
  return "none";
}

SymmetryDescriptor SymmetryDescriptor::parse(const std::string& text) {
  if (text == "none") return none();
  if (text == "continuous") return continuous();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "discrete") return discrete(tail.empty() ? 3 : std::stoi(tail));
    if (head == "data-driven" || head == "data_driven") {
      return data_driven(tail.empty() ? 0.0 : std::stod(tail));
    }
  } catch (const std::logic_error&) {
    // fall through to the error below
  }
  throw InputError("unknown symmetry descriptor '" + text + "'");
}

void ModelSpec::validate() const {
  if (segment_count != 3) throw PreconditionError("PCC model supports exactly 3 segments");
  if (!(segment_length > 0.0)) throw PreconditionError("segment_length must be positive");
  if (intervals < 3 * segment_count) throw PreconditionError("D must be >= 3 * segment_count");
  if (!(kappa_max >= 0.0)) throw PreconditionError("kappa_max must be non-negative");
}

Bounds Bounds::symmetric(double half_width) {
  Bounds b;
  b.lo.setConstant(-half_width);
  b.hi.setConstant(half_width);
  return b;
}

bool Bounds::contains(const Configuration& q, double tol) const {
  return q.allFinite() && ((q - lo).array() >= -tol).all() && ((hi - q).array() >= -tol).all();
}

Configuration Bounds::clamp(const Configuration& q) const {
  return q.cwiseMax(lo).cwiseMin(hi);
}

Shape::Shape(Configuration config, std::vector<Vec3> points, Rotation tip_rotation)
    : config_(std::move(config)),
      points_(std::move(points)),
      tip_rotation_(std::move(tip_rotation)) {
  arclen_.resize(points_.size(), 0.0);
  for (std::size_t j = 1; j < points_.size(); ++j) {
    arclen_[j] = arclen_[j - 1] + (points_[j] - points_[j - 1]).norm();
  }
}

Pose ForwardModel::tip_pose(const Configuration& q) const { return shape(q).tip_pose(); }

Configuration ForwardModel::rotate_about_base(const Configuration&, double) const {
  throw PreconditionError("forward model has no analytic radial symmetry");
}

namespace {

// sin(t)/t and (1 - cos t)/t^2 with series near zero.
void arc_coefficients(double t, double& sinc, double& cosc) {
  const double t2 = t * t;
  if (std::abs(t) < 1e-4) {
    sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    cosc = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    sinc = std::sin(t) / t;
    cosc = (1.0 - std::cos(t)) / t2;
  }
}

struct ArcFrame {
  Vec3 position;
  Rotation rotation;
};

// Frame at arc length s along a segment with curvature vector (kx, ky),
// expressed in the segment's base frame (tangent = +z).
ArcFrame arc_frame(double kx, double ky, double s) {
  const double kappa = std::hypot(kx, ky);
  const double theta = kappa * s;
  double sinc = 0.0;
  double cosc = 0.0;
  arc_coefficients(theta, sinc, cosc);

  ArcFrame f;
  f.position = Vec3(s * s * cosc * kx, s * s * cosc * ky, s * sinc);

  // Body angular velocity (-ky, kx, 0) integrated over s.
  const Vec3 w(-ky * s, kx * s, 0.0);
  Eigen::Matrix3d k;
  k << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  f.rotation = Rotation::Identity() + sinc * k + cosc * (k * k);
  return f;
}

void check_domain(const ModelSpec& spec, const Configuration& q) {
  if (!q.allFinite()) throw BoundsError("configuration has non-finite components");
  const double limit = std::sqrt(2.0) * spec.kappa_max * (1.0 + 1e-12) + 1e-15;
  for (int seg = 0; seg < spec.segment_count; ++seg) {
    if (std::hypot(q[2 * seg], q[2 * seg + 1]) > limit) {
      throw BoundsError("segment curvature outside model bounds");
    }
  }
}

}  // namespace

Shape pcc_forward(const ModelSpec& spec, const Configuration& q) {
  spec.validate();
  check_domain(spec, q);

  const int segs = spec.segment_count;
  const double seg_len = spec.segment_length;
  const int d = spec.intervals;

  // Base frame of every segment.
  std::vector<Pose> seg_base(segs);
  for (int k = 1; k < segs; ++k) {
    const ArcFrame f = arc_frame(q[2 * (k - 1)], q[2 * (k - 1) + 1], seg_len);
    seg_base[k].rotation = seg_base[k - 1].rotation * f.rotation;
    seg_base[k].translation = seg_base[k - 1].translation + seg_base[k - 1].rotation * f.position;
  }

  std::vector<Vec3> points(d + 1);
  points[0] = Vec3::Zero();
  const double total = spec.nominal_length();
  for (int j = 1; j < d; ++j) {
    const double s = total * static_cast<double>(j) / d;
    const int k = std::min(static_cast<int>(s / seg_len), segs - 1);
    const double local = s - k * seg_len;
    const ArcFrame f = arc_frame(q[2 * k], q[2 * k + 1], local);
    points[j] = seg_base[k].translation + seg_base[k].rotation * f.position;
  }
  const int last = segs - 1;
  const ArcFrame tip = arc_frame(q[2 * last], q[2 * last + 1], seg_len);
  points[d] = seg_base[last].translation + seg_base[last].rotation * tip.position;
  const Rotation tip_rotation = seg_base[last].rotation * tip.rotation;

  return Shape(q, std::move(points), tip_rotation);
}

Pose tip_pose(const ModelSpec& spec, const Configuration& q) {
  return pcc_forward(spec, q).tip_pose();
}

PccModel::PccModel(ModelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Shape PccModel::shape(const Configuration& q) const { return pcc_forward(spec_, q); }

Pose PccModel::tip_pose(const Configuration& q) const { return pcc_forward(spec_, q).tip_pose(); }

Bounds PccModel::sampling_bounds() const { return Bounds::symmetric(spec_.kappa_max); }

bool PccModel::in_domain(const Configuration& q) const {
  try {
    check_domain(spec_, q);
    return true;
  } catch (const BoundsError&) {
    return false;
  }
}

Configuration PccModel::rotate_about_base(const Configuration& q, double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Configuration out;
  for (int seg = 0; seg < spec_.segment_count; ++seg) {
    const double kx = q[2 * seg];
    const double ky = q[2 * seg + 1];
    out[2 * seg] = c * kx - s * ky;
    out[2 * seg + 1] = s * kx + c * ky;
  }
  return out;
}

Shape CountingModel::shape(const Configuration& q) const {
  ++count_;
  return inner_.shape(q);
}

Pose CountingModel::tip_pose(const Configuration& q) const {
  ++count_;
  return inner_.tip_pose(q);
}

}  // namespace ftl
