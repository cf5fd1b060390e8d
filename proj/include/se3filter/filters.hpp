#pragma once

#include <cstdint>

#include "se3filter/lie.hpp"

namespace se3filter {

/// Adaptation and correction gains shared by both estimators. Gamma and Pi
/// are the scalar multiples gamma*I6 and pi_bar*I6.
struct FilterGains {
  double gamma = 1.0;
  double pi_bar = 1.0;
  double k_b = 0.1;
  double k_sigma = 0.1;
  double k_p = 2.0;
  double k_w = 3.0;
  double epsilon = 0.5;

  void validate_deterministic() const {
    if (!(gamma > 0 && k_b > 0 && k_p > 0 && k_w > 0)) {
      throw InvalidArgument("FilterGains: gamma, k_b, k_p, k_w must be > 0");
    }
  }
  /// The stochastic stability argument additionally needs k_p * k_w > 4.5.
  void validate_stochastic() const {
    validate_deterministic();
    if (!(pi_bar > 0 && k_sigma > 0 && epsilon > 0)) {
      throw InvalidArgument("FilterGains: pi_bar, k_sigma, epsilon must be > 0");
    }
    if (!(k_p * k_w > 4.5)) {
      throw InvalidArgument("FilterGains: k_p*k_w must exceed 4.5");
    }
  }
};

/// Estimator state. `sigma` is the covariance-bound estimate and stays zero
/// under the deterministic law. `steps` drives the periodic re-projection of
/// the rotation estimate onto SO(3).
struct FilterState {
  Pose pose;
  Vec6 bias = Vec6::Zero();
  Vec6 sigma = Vec6::Zero();
  std::uint64_t steps = 0;
};

/// Error quantities shared by the correction terms and the diagnostics:
/// the group error T~ = T_y T^-1 with R~ = R_y R^T and P~ = P_y - R~ P,
/// its Rodriguez vector, distance, and Y(T~) = [Y_a(R~); P~].
struct ErrorDiagnostics {
  Pose pose_error_group;
  Vec3 rho = Vec3::Zero();
  double attitude_distance = 0.0;
  Vec3 position_error = Vec3::Zero();  // measured minus estimated position
  Vec6 upsilon = Vec6::Zero();
  double V_det = 0.0;    // state-error part of the deterministic potential
  double V_stoch = 0.0;  // state-error part of the stochastic potential
};

inline ErrorDiagnostics pose_error(const Pose& measured, const Pose& estimate) {
  ErrorDiagnostics err;
  err.pose_error_group = measured * pose_inverse(estimate);
  err.rho = rotation_to_rodriguez(err.pose_error_group.R);
  err.attitude_distance = distance_so3(err.pose_error_group.R);
  err.position_error = measured.p - estimate.p;
  err.upsilon << upsilon_a(err.pose_error_group.R), err.pose_error_group.p;

  double r2 = err.rho.squaredNorm();
  double att_term = (r2 / (1.0 + r2)) * (r2 / (1.0 + r2));
  double p2 = err.pose_error_group.p.squaredNorm();
  err.V_det = att_term + 2.0 * p2;
  err.V_stoch = att_term + p2 * p2;
  return err;
}

namespace detail {

// A discrete update can land arbitrarily close to the distance-1 set even
// though the set itself is unstable. Every 1/(1-x) factor therefore sees a
// clamped distance; the hard error fires only at the set itself, where the
// Rodriguez vector is already meaningless.
constexpr double kPoleClamp = 1e-6;
constexpr double kPoleError = 1e-9;

inline double clamped_distance(double attitude_distance, const char* who) {
  if (attitude_distance >= 1.0 - kPoleError) {
    throw SingularAttitude(std::string(who) +
                           ": attitude error on the distance-1 set");
  }
  return std::min(attitude_distance, 1.0 - kPoleClamp);
}

}  // namespace detail

/// Correction twist of the deterministic estimator:
/// W = k_p Ad^-1 blkdiag(((2-x)/(1-x)) I, R~^T) Y(T~), x = |R~|_I.
inline Vec6 det_correction(const ErrorDiagnostics& err, const Pose& estimate,
                           const FilterGains& g) {
  double x = detail::clamped_distance(err.attitude_distance, "det_correction");
  Mat6 shape = Mat6::Zero();
  shape.topLeftCorner<3, 3>() =
      ((2.0 - x) / (1.0 - x)) * Mat3::Identity();
  shape.bottomRightCorner<3, 3>() = err.pose_error_group.R.transpose();
  return g.k_p * adjoint_matrix(pose_inverse(estimate)) * shape * err.upsilon;
}

/// One 1/rate step of the deterministic estimator: the pose advances by the
/// group exponential of the corrected twist, the bias estimate by explicit
/// Euler on
///   db = -Gamma Ad^T blkdiag(x I, 4 R~^T) Y(T~) - k_b Gamma b.
inline FilterState det_step(const FilterState& state, const Pose& measured,
                            const Twist& measured_twist, const FilterGains& g,
                            double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("det_step: dt must be > 0");
  ErrorDiagnostics err = pose_error(measured, state.pose);
  Vec6 w = det_correction(err, state.pose, g);

  double x = err.attitude_distance;
  Mat6 shape = Mat6::Zero();
  shape.topLeftCorner<3, 3>() = x * Mat3::Identity();
  shape.bottomRightCorner<3, 3>() = 4.0 * err.pose_error_group.R.transpose();
  Vec6 bias_rate =
      -g.gamma * adjoint_matrix(state.pose).transpose() * shape * err.upsilon -
      g.k_b * g.gamma * state.bias;

  Vec6 twist = measured_twist.vec() - state.bias + g.k_w * w;

  FilterState next = state;
  next.pose = state.pose * pose_exp(Twist::from_vec(twist), dt);
  next.bias = state.bias + dt * bias_rate;
  next.steps = state.steps + 1;
  if (next.steps % 1000 == 0) next.pose.R = orthonormalize(next.pose.R);
  return next;
}

/// D_Y, the 3x3 matrix whose columns are each Y_a(R~).
inline Mat3 upsilon_column_matrix(const ErrorDiagnostics& err) {
  Mat3 d;
  Vec3 ua = err.upsilon.head<3>();
  d << ua, ua, ua;
  return d;
}

/// Correction twist of the stochastic estimator:
/// W = k_p Ad_{T^-1} ((1/eps) blkdiag(((2-x)/(1-x)) I, R~^T) Y(T~)
///                   + blkdiag(D_Y, 0) sigma).
inline Vec6 stoch_correction(const ErrorDiagnostics& err, const Pose& estimate,
                             const Vec6& sigma_hat, const FilterGains& g) {
  double x = detail::clamped_distance(err.attitude_distance, "stoch_correction");
  Mat6 shape = Mat6::Zero();
  shape.topLeftCorner<3, 3>() = ((2.0 - x) / (1.0 - x)) * Mat3::Identity();
  shape.bottomRightCorner<3, 3>() = err.pose_error_group.R.transpose();

  Mat6 dshape = Mat6::Zero();
  dshape.topLeftCorner<3, 3>() = upsilon_column_matrix(err);

  return g.k_p * adjoint_matrix(pose_inverse(estimate)) *
         ((1.0 / g.epsilon) * shape * err.upsilon + dshape * sigma_hat);
}

/// One 1/rate step of the stochastic estimator (all three state components):
///   dT     = T [y_m - b + k_w W + Ad_{T^-1} blkdiag((1/2)(1/(1-x)) I, 0)
///                 diag(Y(T~)) sigma]^ dt
///   db     = -Gamma Ad^T blkdiag(x I, 4 |P~|^2 R~^T) Y(T~) - k_b Gamma b
///   dsigma = Pi ((1/4)(x/(1-x)) diag([Y_a; 0])
///             + k_w k_p blkdiag(x D_Y^T, 0)) Y(T~) - k_sigma Pi sigma
inline FilterState stoch_step(const FilterState& state, const Pose& measured,
                              const Twist& measured_twist, const FilterGains& g,
                              double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("stoch_step: dt must be > 0");
  ErrorDiagnostics err = pose_error(measured, state.pose);
  Vec6 w = stoch_correction(err, state.pose, state.sigma, g);

  double x = detail::clamped_distance(err.attitude_distance, "stoch_step");
  Mat6 ad_inv = adjoint_matrix(pose_inverse(state.pose));

  Mat6 comp_shape = Mat6::Zero();
  comp_shape.topLeftCorner<3, 3>() =
      0.5 / (1.0 - x) * Mat3::Identity();
  Vec6 compensation =
      ad_inv * comp_shape * err.upsilon.asDiagonal() * state.sigma;

  Vec6 twist = measured_twist.vec() - state.bias + g.k_w * w + compensation;

  Mat6 bias_shape = Mat6::Zero();
  bias_shape.topLeftCorner<3, 3>() = x * Mat3::Identity();
  bias_shape.bottomRightCorner<3, 3>() =
      4.0 * err.pose_error_group.p.squaredNorm() *
      err.pose_error_group.R.transpose();
  Vec6 bias_rate =
      -g.gamma * adjoint_matrix(state.pose).transpose() * bias_shape *
          err.upsilon -
      g.k_b * g.gamma * state.bias;

  Vec6 att_diag = Vec6::Zero();
  att_diag.head<3>() = err.upsilon.head<3>();
  Mat6 sigma_shape = 0.25 * (x / (1.0 - x)) * Mat6(att_diag.asDiagonal());
  sigma_shape.topLeftCorner<3, 3>() +=
      g.k_w * g.k_p * x * upsilon_column_matrix(err).transpose();
  Vec6 sigma_rate = g.pi_bar * sigma_shape * err.upsilon -
                    g.k_sigma * g.pi_bar * state.sigma;

  FilterState next = state;
  next.pose = state.pose * pose_exp(Twist::from_vec(twist), dt);
  next.bias = state.bias + dt * bias_rate;
  next.sigma = state.sigma + dt * sigma_rate;
  next.steps = state.steps + 1;
  if (next.steps % 1000 == 0) next.pose.R = orthonormalize(next.pose.R);
  return next;
}

/// Deterministic potential
/// V = (|rho|^2/(1+|rho|^2))^2 + 2 |P~|^2 + b~^T Gamma^-1 b~ / 2.
inline double lyapunov_det(const ErrorDiagnostics& err, const Vec6& bias_error,
                           const FilterGains& g) {
  return err.V_det + 0.5 * bias_error.squaredNorm() / g.gamma;
}

/// Stochastic potential
/// V = (|rho|^2/(1+|rho|^2))^2 + |P~|^4 + b~^T Gamma^-1 b~ / 2
///     + s~^T Pi^-1 s~ / 2.
inline double lyapunov_stoch(const ErrorDiagnostics& err, const Vec6& bias_error,
                             const Vec6& sigma_error, const FilterGains& g) {
  return err.V_stoch + 0.5 * bias_error.squaredNorm() / g.gamma +
         0.5 * sigma_error.squaredNorm() / g.pi_bar;
}

// Closed-form partial derivatives of the stochastic potential, used by the
// gradient checks.

inline Vec3 potential_grad_rho(const Vec3& rho) {
  double n2 = rho.squaredNorm();
  double c = 1.0 + n2;
  return 4.0 * n2 / (c * c * c) * rho;
}

inline Mat3 potential_hess_rho(const Vec3& rho) {
  double n2 = rho.squaredNorm();
  double c = 1.0 + n2;
  return 4.0 *
         (c * n2 * Mat3::Identity() + (2.0 - 4.0 * n2) * rho * rho.transpose()) /
         (c * c * c * c);
}

inline Vec3 potential_grad_pos(const Vec3& p) {
  return 4.0 * p.squaredNorm() * p;
}

inline Mat3 potential_hess_pos(const Vec3& p) {
  return 4.0 * p.squaredNorm() * Mat3::Identity() + 8.0 * p * p.transpose();
}

}  // namespace se3filter
