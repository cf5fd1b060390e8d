#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "se3filter/lie.hpp"

namespace se3filter {

/// One sinusoidal channel: amplitude * sin(frequency * t + phase).
struct AxisSignal {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
  double phase = 0.0;      // rad
  double at(double t) const { return amplitude * std::sin(frequency * t + phase); }
};

/// Reference angular and translational velocity profiles, per axis.
struct SignalSpec {
  std::array<AxisSignal, 3> omega;
  std::array<AxisSignal, 3> velocity;
};

inline Twist true_twist(double t, const SignalSpec& spec) {
  Twist y;
  for (int i = 0; i < 3; ++i) {
    y.omega(i) = spec.omega[i].at(t);
    y.v(i) = spec.velocity[i].at(t);
  }
  return y;
}

/// One kinematic step of the pose under a twist held constant for dt.
inline Pose propagate_truth(const Pose& T, const Twist& y, double dt) {
  return T * pose_exp(y, dt);
}

/// Rodriguez-vector kinematics: (I + [rho]x + rho rho^T) Omega / 2.
inline Vec3 rodriguez_rate(const Vec3& rho, const Vec3& omega) {
  return 0.5 * (Mat3::Identity() + skew(rho) + rho * rho.transpose()) * omega;
}

/// Block-diagonal gain of the vector-form dynamics:
/// [drho; dP] = diffusion_matrix(rho) * [Omega; V].
inline Mat6 diffusion_matrix(const Vec3& rho) {
  Mat6 g = Mat6::Zero();
  g.topLeftCorner<3, 3>() =
      0.5 * (Mat3::Identity() + skew(rho) + rho * rho.transpose());
  g.bottomRightCorner<3, 3>() = rodriguez_to_rotation(rho);
  return g;
}

/// Stratonovich-to-Ito drift correction for the Rodriguez-vector SDE with
/// angular noise covariance gain Q_Omega^2. The position block vanishes,
/// so the result is [(I + [rho]x + rho rho^T) Q_Omega^2 rho / 4; 0].
inline Vec6 wong_zakai_correction(const Vec3& rho, const Mat3& q_omega_sq) {
  Vec6 w = Vec6::Zero();
  w.head<3>() = 0.25 *
                (Mat3::Identity() + skew(rho) + rho * rho.transpose()) *
                q_omega_sq * rho;
  return w;
}

/// Noise gain of the velocity SDE. The diagonal of Q may vary with time;
/// sigma holds the elementwise upper bound of Q^2.
struct DiffusionSpec {
  std::function<Vec6(double)> q_diag;
  Vec6 sigma = Vec6::Zero();

  static DiffusionSpec constant(const Vec6& q) {
    DiffusionSpec spec;
    spec.q_diag = [q](double) { return q; };
    spec.sigma = q.cwiseProduct(q);
    return spec;
  }
};

/// Pose accumulator that re-projects the rotation onto SO(3) every
/// `renorm_interval` compositions to bound floating-point drift.
struct PoseIntegrator {
  Pose pose;
  std::uint64_t steps = 0;
  std::uint64_t renorm_interval = 1000;

  void advance(const Twist& y, double dt) {
    pose = propagate_truth(pose, y, dt);
    if (++steps % renorm_interval == 0) pose.R = orthonormalize(pose.R);
  }
};

}  // namespace se3filter
