#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ftl/errors.hpp"
#include "ftl/forward_model.hpp"
#include "support.hpp"

using namespace ftl;
using ftl::test::max_abs_diff;

namespace {

constexpr double kPi = std::numbers::pi;

Configuration random_config(std::mt19937_64& rng, double kappa_max = kPi / 2) {
  Configuration q;
  for (int i = 0; i < kConfigDim; ++i) q[i] = uniform(rng, -kappa_max, kappa_max);
  return q;
}

Configuration rotate_pairs(const Configuration& q, double psi) {
  Configuration out = q;
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  for (int i = 0; i < 3; ++i) {
    out[2 * i] = c * q[2 * i] - s * q[2 * i + 1];
    out[2 * i + 1] = s * q[2 * i] + c * q[2 * i + 1];
  }
  return out;
}

}  // namespace

TEST_CASE("pcc_forward: zero configuration is a straight line") {
  const ModelSpec spec;
  const Shape s = pcc_forward(spec, Configuration::Zero());
  REQUIRE(s.points().size() == 61u);
  for (int j = 0; j <= 60; ++j) {
    CHECK((s.points()[j] - Vec3(0, 0, 3.0 * j / 60)).norm() < 1e-12);
  }
  CHECK(max_abs_diff(s.tip_rotation(), Rotation::Identity()) < 1e-15);
}

TEST_CASE("pcc_forward: planar first-segment quarter bend matches the arc integral") {
  const ModelSpec spec;
  Configuration q = Configuration::Zero();
  q[0] = kPi / 2;
  const Shape s = pcc_forward(spec, q);
  const double k = kPi / 2;
  for (int j = 0; j <= 20; ++j) {
    const double arc = j / 20.0;
    const Vec3 expected((1 - std::cos(k * arc)) / k, 0.0, std::sin(k * arc) / k);
    CHECK((s.points()[j] - expected).norm() < 1e-12);
  }
  // The bend leaves the tangent along +x; segments two and three are straight.
  CHECK((s.points()[20] - Vec3(2 / kPi, 0, 2 / kPi)).norm() < 1e-12);
  CHECK((s.points()[40] - Vec3(2 / kPi + 1, 0, 2 / kPi)).norm() < 1e-12);
  CHECK((s.tip() - Vec3(2 / kPi + 2, 0, 2 / kPi)).norm() < 1e-12);
}

TEST_CASE("tip_pose: straight and planar examples") {
  const ModelSpec spec;
  const Pose straight = tip_pose(spec, Configuration::Zero());
  CHECK(max_abs_diff(straight.rotation, Rotation::Identity()) < 1e-15);
  CHECK((straight.translation - Vec3(0, 0, 3)).norm() < 1e-12);

  Configuration q = Configuration::Zero();
  q[0] = kPi / 2;
  // Bending towards +x turns the tangent z into x: a quarter turn about +y,
  // the normal of the x-z bending plane.
  CHECK(max_abs_diff(tip_pose(spec, q).rotation, rot_y(kPi / 2)) < 1e-12);
}

TEST_CASE("tip_pose agrees exactly with the last backbone point") {
  std::mt19937_64 rng(11);
  const ModelSpec spec;
  for (int i = 0; i < 200; ++i) {
    const Configuration q = random_config(rng);
    const Shape s = pcc_forward(spec, q);
    const Pose t = tip_pose(spec, q);
    REQUIRE(t.translation == s.tip());
    REQUIRE(t.rotation == s.tip_rotation());
  }
}

TEST_CASE("pcc_forward: rotating every bending pair rotates the shape about z") {
  std::mt19937_64 rng(12);
  const ModelSpec spec;
  const PccModel model(spec);
  for (int i = 0; i < 500; ++i) {
    const Configuration q = random_config(rng);
    const double psi = uniform(rng, -kPi, kPi);
    const Shape a = pcc_forward(spec, q);
    const Shape b = pcc_forward(spec, rotate_pairs(q, psi));
    const Rotation rz = rot_z(psi);
    for (std::size_t j = 0; j < a.points().size(); ++j) {
      REQUIRE((rz * a.points()[j] - b.points()[j]).norm() < 1e-9);
    }
    REQUIRE((model.rotate_about_base(q, psi) - rotate_pairs(q, psi)).norm() < 1e-12);
  }
}

TEST_CASE("pcc_forward: arc length and smoothness invariants") {
  std::mt19937_64 rng(13);
  const ModelSpec spec;
  const double bound = 2 * spec.kappa_max * 3.0 / spec.intervals;
  for (int i = 0; i < 2000; ++i) {
    const Shape s = pcc_forward(spec, random_config(rng));
    REQUIRE(s.points()[0] == Vec3::Zero());
    REQUIRE(std::abs(s.length() - 3.0) < 0.03);
    const auto& p = s.points();
    for (std::size_t j = 1; j + 1 < p.size(); ++j) {
      const Vec3 a = (p[j] - p[j - 1]).normalized();
      const Vec3 b = (p[j + 1] - p[j]).normalized();
      REQUIRE(std::acos(std::clamp(a.dot(b), -1.0, 1.0)) < bound);
    }
    REQUIRE(is_rotation(s.tip_rotation(), 1e-9));
  }
}

TEST_CASE("pcc_forward: deterministic to the bit") {
  std::mt19937_64 rng(14);
  const ModelSpec spec;
  const Configuration q = random_config(rng);
  const Shape a = pcc_forward(spec, q);
  const Shape b = pcc_forward(spec, q);
  CHECK(a.points() == b.points());
  CHECK(a.tip_rotation() == b.tip_rotation());
}

TEST_CASE("pcc_forward: curvature outside the domain throws") {
  Configuration q = Configuration::Zero();
  q[2] = 3.0;
  CHECK_THROWS_AS(pcc_forward(ModelSpec{}, q), BoundsError);
  q[2] = std::nan("");
  CHECK_THROWS_AS(pcc_forward(ModelSpec{}, q), BoundsError);
}

TEST_CASE("model spec validation") {
  ModelSpec spec;
  spec.intervals = 6;
  CHECK_THROWS(spec.validate());
  spec = ModelSpec{};
  spec.segment_length = 0.0;
  CHECK_THROWS(spec.validate());
  CHECK_NOTHROW(ModelSpec{}.validate());
}

TEST_CASE("symmetry descriptor text round trip") {
  for (const auto& d : {SymmetryDescriptor::none(), SymmetryDescriptor::continuous(),
                        SymmetryDescriptor::discrete(3), SymmetryDescriptor::data_driven(0.5)}) {
    CHECK(SymmetryDescriptor::parse(d.to_string()) == d);
  }
  CHECK_THROWS(SymmetryDescriptor::discrete(1));
  CHECK_THROWS(SymmetryDescriptor::parse("radial"));
}

TEST_CASE("counting model counts every evaluation") {
  const PccModel model;
  CountingModel counter(model);
  counter.shape(Configuration::Zero());
  counter.tip_pose(Configuration::Zero());
  counter.shape(Configuration::Zero());
  CHECK(counter.evaluations() == 3);
  counter.reset();
  CHECK(counter.evaluations() == 0);
}

TEST_CASE("sampling bounds and domain") {
  const PccModel model;
  const Bounds b = model.sampling_bounds();
  CHECK(b.lo[0] == doctest::Approx(-kPi / 2));
  CHECK(b.hi[5] == doctest::Approx(kPi / 2));
  Configuration corner = b.hi;
  CHECK(model.in_domain(corner));
  // Rotating a corner keeps it inside the rotation-invariant domain.
  CHECK(model.in_domain(model.rotate_about_base(corner, 0.7)));
}
