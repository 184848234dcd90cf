#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "ftl/errors.hpp"
#include "ftl/experiments.hpp"
#include "ftl/random.hpp"

namespace ftl {

std::string to_string(CurveClass cls) {
  switch (cls) {
    case CurveClass::c:
      return "C";
    case CurveClass::s:
      return "S";
    case CurveClass::robot:
      return "Robot";
  }
  return "?";
}

CurveClass parse_curve_class(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "c") return CurveClass::c;
  if (t == "s") return CurveClass::s;
  if (t == "robot") return CurveClass::robot;
  throw InputError("unknown curve class '" + text + "' (expected C, S or Robot)");
}

std::vector<Vec3> resample_polyline(std::span<const Vec3> polyline, std::size_t n) {
  if (polyline.size() < 2 || n < 2) throw PreconditionError("resample_polyline: too few points");
  std::vector<double> cum(polyline.size(), 0.0);
  for (std::size_t k = 1; k < polyline.size(); ++k) {
    cum[k] = cum[k - 1] + (polyline[k] - polyline[k - 1]).norm();
  }
  const double total = cum.back();
  std::vector<Vec3> out;
  out.reserve(n);
  out.push_back(polyline.front());
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
    const double span = cum[seg] - cum[seg - 1];
    const double u = span > 0.0 ? (target - cum[seg - 1]) / span : 0.0;
    out.push_back(polyline[seg - 1] + u * (polyline[seg] - polyline[seg - 1]));
  }
  out.push_back(polyline.back());
  return out;
}

namespace {

Vec3 least_parallel_axis(const Vec3& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().minCoeff(&i);
  return Vec3::Unit(i);
}

}  // namespace

CCurve gen_c_curve_detail(std::uint64_t seed, std::size_t n, double robot_length) {
  if (n < 2) throw PreconditionError("gen_c_curve: n must be >= 2");
  const double cap = kArcLengthCapFraction * robot_length;
  std::mt19937_64 rng(seed);
  Vec3 e;
  double psi = 0.0;
  double arc = 0.0;
  do {
    e = Vec3(uniform(rng, 0.5, 1.5), uniform(rng, -0.75, 0.25), uniform(rng, 1.0, 2.0));
    psi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    arc = std::numbers::pi * e.norm() / 2.0;
  } while (arc > cap);

  const double chord = e.norm();
  const Vec3 u = e / chord;
  const Vec3 n0 = u.cross(least_parallel_axis(u)).normalized();
  const Vec3 n1 = u.cross(n0);
  const Vec3 normal = std::cos(psi) * n0 + std::sin(psi) * n1;
  const Vec3 center = 0.5 * e;
  const double radius = 0.5 * chord;

  std::vector<Vec3> pts;
  pts.reserve(n);
  pts.push_back(Vec3::Zero());
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double tau = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1);
    pts.push_back(center - radius * std::cos(tau) * u + radius * std::sin(tau) * normal);
  }
  pts.push_back(e);
  return CCurve{e, normal, arc, WaypointPath(std::move(pts))};
}

WaypointPath gen_c_curve(std::uint64_t seed, std::size_t n, double robot_length) {
  return gen_c_curve_detail(seed, n, robot_length).path;
}

Vec3 CubicBezier::operator()(double t) const {
  const double s = 1.0 - t;
  return s * s * s * control[0] + 3.0 * s * s * t * control[1] + 3.0 * s * t * t * control[2] +
         t * t * t * control[3];
}

Vec3 CubicBezier::derivative(double t) const {
  const double s = 1.0 - t;
  return 3.0 * s * s * (control[1] - control[0]) + 6.0 * s * t * (control[2] - control[1]) +
         3.0 * t * t * (control[3] - control[2]);
}

Vec3 CubicBezier::second_derivative(double t) const {
  return 6.0 * (1.0 - t) * (control[2] - 2.0 * control[1] + control[0]) +
         6.0 * t * (control[3] - 2.0 * control[2] + control[1]);
}

SCurve gen_s_curve_detail(std::uint64_t seed, std::size_t n, double robot_length) {
  if (n < 2) throw PreconditionError("gen_s_curve: n must be >= 2");
  constexpr std::size_t kTable = 4096;
  const double cap = kArcLengthCapFraction * robot_length;
  std::mt19937_64 rng(seed);

  CubicBezier curve;
  std::vector<double> table_t(kTable + 1);
  std::vector<double> table_s(kTable + 1);
  for (;;) {
    const Vec3 e(uniform(rng, -2.25, -1.25), uniform(rng, -0.5, 0.5), 1.5);
    const Vec3 lift(0.0, 0.0, 0.4 * e.norm());
    curve.control = {Vec3::Zero(), lift, e - lift, e};
    Vec3 prev = curve(0.0);
    table_t[0] = 0.0;
    table_s[0] = 0.0;
    for (std::size_t k = 1; k <= kTable; ++k) {
      table_t[k] = static_cast<double>(k) / kTable;
      const Vec3 p = curve(table_t[k]);
      table_s[k] = table_s[k - 1] + (p - prev).norm();
      prev = p;
    }
    if (table_s.back() <= cap) break;
  }

  const double total = table_s.back();
  std::vector<Vec3> pts;
  pts.reserve(n);
  pts.push_back(curve.control[0]);
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg < kTable && table_s[seg] < target) ++seg;
    const double u = (target - table_s[seg - 1]) / (table_s[seg] - table_s[seg - 1]);
    pts.push_back(curve(table_t[seg - 1] + u * (table_t[seg] - table_t[seg - 1])));
  }
  pts.push_back(curve.control[3]);
  return SCurve{curve, total, WaypointPath(std::move(pts))};
}

WaypointPath gen_s_curve(std::uint64_t seed, std::size_t n, double robot_length) {
  return gen_s_curve_detail(seed, n, robot_length).path;
}

RobotCurve gen_robot_curve_detail(std::uint64_t seed, const ModelSpec& spec, std::size_t n) {
  if (n < 2) throw PreconditionError("gen_robot_curve: n must be >= 2");
  std::mt19937_64 rng(seed);
  RobotCurve out;
  for (int seg = 0; seg < spec.segment_count; ++seg) {
    const double mag = uniform(rng, 0.2 * spec.kappa_max, 0.8 * spec.kappa_max);
    const double dir = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    out.config[2 * seg] = mag * std::cos(dir);
    out.config[2 * seg + 1] = mag * std::sin(dir);
  }
  // Sampling the model at n - 1 intervals puts every waypoint on the backbone.
  ModelSpec sampled = spec;
  sampled.intervals = static_cast<int>(n - 1);
  out.path = WaypointPath(pcc_forward(sampled, out.config).points());
  return out;
}

WaypointPath gen_robot_curve(std::uint64_t seed, const ModelSpec& spec, std::size_t n) {
  return gen_robot_curve_detail(seed, spec, n).path;
}

WaypointPath generate_path(const PathSpec& spec, const ModelSpec& model_spec) {
  switch (spec.cls) {
    case CurveClass::c:
      return gen_c_curve(spec.seed, spec.n, model_spec.nominal_length());
    case CurveClass::s:
      return gen_s_curve(spec.seed, spec.n, model_spec.nominal_length());
    case CurveClass::robot:
      return gen_robot_curve(spec.seed, model_spec, spec.n);
  }
  throw InputError("unknown curve class");
}

std::uint64_t path_seed(std::uint64_t base, CurveClass cls, std::size_t k) {
  return base + 1'000'000ULL * static_cast<std::uint64_t>(cls) + k;
}

}  // namespace ftl
