#pragma once

// Shared random generators for the test suites. Every generator takes an
// explicit engine so each test pins its own seed.

#include <random>

#include "se3filter/lie.hpp"

namespace test_support {

using se3filter::Mat3;
using se3filter::Pose;
using se3filter::Twist;
using se3filter::Vec3;
using se3filter::Vec6;

inline Vec3 random_vec3(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return {dist(rng), dist(rng), dist(rng)};
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vec3 v{dist(rng), dist(rng), dist(rng)};
  while (v.norm() < 1e-6) v = {dist(rng), dist(rng), dist(rng)};
  return v.normalized();
}

/// Rotation drawn as a uniform axis with angle in (-pi + margin, pi - margin).
inline Mat3 random_rotation(std::mt19937_64& rng, double angle_margin = 1e-2) {
  std::uniform_real_distribution<double> ang(-M_PI + angle_margin,
                                             M_PI - angle_margin);
  return se3filter::angle_axis_to_rotation(ang(rng), random_unit(rng));
}

inline Pose random_pose(std::mt19937_64& rng, double pos_scale = 2.0) {
  return {random_rotation(rng), random_vec3(rng, -pos_scale, pos_scale)};
}

inline Twist random_twist(std::mt19937_64& rng, double scale = 1.0) {
  return {random_vec3(rng, -scale, scale), random_vec3(rng, -scale, scale)};
}

inline Vec6 random_vec6(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Vec6 v;
  v << random_vec3(rng, lo, hi), random_vec3(rng, lo, hi);
  return v;
}

}  // namespace test_support
