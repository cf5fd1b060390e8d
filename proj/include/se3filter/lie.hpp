#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "se3filter/errors.hpp"

namespace se3filter {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Body-frame group velocity: angular (rad/s) stacked over translational (m/s).
struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  Vec6 vec() const {
    Vec6 y;
    y << omega, v;
    return y;
  }
  static Twist from_vec(const Vec6& y) { return {y.head<3>(), y.tail<3>()}; }
};

/// Rigid-body pose: rotation (body -> inertial) and inertial position.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  /// 4x4 homogeneous matrix with bottom row [0 0 0 1].
  Mat4 matrix() const {
    Mat4 T = Mat4::Identity();
    T.topLeftCorner<3, 3>() = R;
    T.topRightCorner<3, 1>() = p;
    return T;
  }
  static Pose identity() { return {}; }
};

inline Pose pose_compose(const Pose& a, const Pose& b) {
  return {a.R * b.R, a.R * b.p + a.p};
}

inline Pose operator*(const Pose& a, const Pose& b) { return pose_compose(a, b); }

inline Pose pose_inverse(const Pose& a) {
  Mat3 Rt = a.R.transpose();
  return {Rt, -(Rt * a.p)};
}

/// [a]x, the antisymmetric matrix with skew(a) * b = a x b.
inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
      -a.y(), a.x(), 0.0;
  return s;
}

/// Inverse of skew. Input must be antisymmetric to within 1e-9.
inline Vec3 vex(const Mat3& A) {
  if ((A + A.transpose()).norm() > 1e-9) {
    throw InvalidArgument("vex: matrix is not antisymmetric");
  }
  return {A(2, 1), A(0, 2), A(1, 0)};
}

/// 6-vector [omega; v] to its se(3) matrix.
inline Mat4 wedge(const Twist& y) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = skew(y.omega);
  m.topRightCorner<3, 1>() = y.v;
  return m;
}

inline Mat4 wedge(const Vec6& y) { return wedge(Twist::from_vec(y)); }

/// Antisymmetric part (M - M^T) / 2.
inline Mat3 antisym_project(const Mat3& m) {
  return 0.5 * (m - m.transpose());
}

/// vex of the antisymmetric part.
inline Vec3 upsilon_a(const Mat3& m) {
  Mat3 a = antisym_project(m);
  return {a(2, 1), a(0, 2), a(1, 0)};
}

/// Stacks upsilon_a of the rotation block over the translation column.
inline Vec6 upsilon(const Mat4& m) {
  Vec6 u;
  u << upsilon_a(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>();
  return u;
}

/// Normalized Euclidean distance on SO(3): Tr(I - R) / 4, in [0, 1].
inline double distance_so3(const Mat3& R) {
  return 0.25 * (Mat3::Identity() - R).trace();
}

/// Rodrigues formula for a rotation by `alpha` radians about the unit axis `u`.
inline Mat3 angle_axis_to_rotation(double alpha, const Vec3& u) {
  if (std::abs(u.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("angle_axis_to_rotation: axis is not unit length");
  }
  Mat3 k = skew(u);
  return Mat3::Identity() + std::sin(alpha) * k + (1.0 - std::cos(alpha)) * k * k;
}

/// Rotation from a Rodriguez vector rho = tan(alpha/2) * u.
inline Mat3 rodriguez_to_rotation(const Vec3& rho) {
  double n2 = rho.squaredNorm();
  return ((1.0 - n2) * Mat3::Identity() + 2.0 * rho * rho.transpose() +
          2.0 * skew(rho)) /
         (1.0 + n2);
}

/// Rodriguez vector of a rotation: vex(R - R^T) / (1 + Tr(R)).
/// Undefined at rotation angle pi, where 1 + Tr(R) = 0.
inline Vec3 rotation_to_rodriguez(const Mat3& R) {
  double denom = 1.0 + R.trace();
  if (denom <= 1e-9) {
    throw SingularAttitude("rotation_to_rodriguez: Tr(R) at the -1 pole");
  }
  Mat3 d = R - R.transpose();
  return Vec3{d(2, 1), d(0, 2), d(1, 0)} / denom;
}

/// 6x6 adjoint of a pose: [[R, 0], [[p]x R, R]].
inline Mat6 adjoint_matrix(const Pose& T) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = T.R;
  ad.bottomLeftCorner<3, 3>() = skew(T.p) * T.R;
  ad.bottomRightCorner<3, 3>() = T.R;
  return ad;
}

/// Conjugation T M T^-1 of an se(3) element.
inline Mat4 adjoint_action(const Pose& T, const Mat4& m) {
  Mat3 top = m.topLeftCorner<3, 3>();
  bool se3_shape = (top + top.transpose()).norm() <= 1e-9 &&
                   m.row(3).norm() <= 1e-9;
  if (!se3_shape) {
    throw InvalidArgument("adjoint_action: matrix is not in se(3)");
  }
  return T.matrix() * m * pose_inverse(T).matrix();
}

namespace detail {

// sin(t)/t and (1-cos t)/t^2 and (t - sin t)/t^3 with Taylor fallbacks,
// used by the closed-form exponential.
inline void exp_coefficients(double theta, double& a, double& b, double& c) {
  if (theta < 1e-8) {
    double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    double t2 = theta * theta;
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / t2;
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
}

}  // namespace detail

/// Closed-form exp(dt * wedge(y)): exact flow of a constant twist held for dt.
inline Pose pose_exp(const Twist& y, double dt) {
  Vec3 w = y.omega * dt;
  Vec3 u = y.v * dt;
  double theta = w.norm();
  double a, b, c;
  detail::exp_coefficients(theta, a, b, c);
  Mat3 k = skew(w);
  Mat3 k2 = k * k;
  Pose out;
  out.R = Mat3::Identity() + a * k + b * k2;
  out.p = (Mat3::Identity() + b * k + c * k2) * u;
  return out;
}

/// Nearest rotation in the Frobenius sense (polar factor via SVD).
inline Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

inline bool is_rotation(const Mat3& R, double tol = 1e-9) {
  return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

/// Intrinsic Z-Y-X (yaw-pitch-roll) angles, returned as (roll, pitch, yaw).
inline Vec3 euler_zyx(const Mat3& R) {
  double pitch = -std::asin(std::clamp(R(2, 0), -1.0, 1.0));
  double roll = std::atan2(R(2, 1), R(2, 2));
  double yaw = std::atan2(R(1, 0), R(0, 0));
  return {roll, pitch, yaw};
}

inline Mat3 rotation_from_euler_zyx(double roll, double pitch, double yaw) {
  return angle_axis_to_rotation(yaw, Vec3::UnitZ()) *
         angle_axis_to_rotation(pitch, Vec3::UnitY()) *
         angle_axis_to_rotation(roll, Vec3::UnitX());
}

inline constexpr double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace se3filter
