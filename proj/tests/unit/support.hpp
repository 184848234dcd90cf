#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ftl/geometry.hpp"
#include "ftl/random.hpp"

namespace ftl::test {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline Vec3 random_point(std::mt19937_64& rng, double half = 2.0) {
  return Vec3(uniform(rng, -half, half), uniform(rng, -half, half), uniform(rng, -half, half));
}

inline Pose random_pose(std::mt19937_64& rng) {
  return Pose{rotation_from_axis_angle(random_unit(rng), uniform(rng, -3.0, 3.0)),
              random_point(rng)};
}

inline std::vector<Vec3> random_cloud(std::mt19937_64& rng, std::size_t n, double half = 2.0) {
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(rng, half));
  return out;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace ftl::test
