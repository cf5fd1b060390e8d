#pragma once

#include <vector>

#include "se3filter/lie.hpp"
#include "se3filter/sensors.hpp"

namespace se3filter {

/// Weighted unit-vector pairs for attitude determination. Confidences are
/// normalized to sum to one on construction.
struct WahbaInput {
  std::vector<DirectionPair> pairs;
  std::vector<double> confidence;

  static WahbaInput weighted(std::vector<DirectionPair> pairs,
                             std::vector<double> weights) {
    if (pairs.empty() || pairs.size() != weights.size()) {
      throw InvalidArgument("WahbaInput: empty or mismatched inputs");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) throw InvalidArgument("WahbaInput: weights must be > 0");
      total += w;
    }
    for (double& w : weights) w /= total;
    return {std::move(pairs), std::move(weights)};
  }

  static WahbaInput uniform(std::vector<DirectionPair> pairs) {
    std::vector<double> weights(pairs.size(), 1.0);
    return weighted(std::move(pairs), std::move(weights));
  }
};

/// Attitude that best aligns the weighted pairs: with the profile matrix
/// B = sum_i s_i v_i^B (v_i^I)^T = U S V^T, the determinant-corrected factors
/// U+ = U diag(1, 1, det U) and V+ = V diag(1, 1, det V) give R_y = V+ U+^T,
/// always a proper rotation. Two non-collinear pairs (rank 2) suffice.
inline Mat3 wahba_svd(const WahbaInput& input) {
  Mat3 profile = Mat3::Zero();
  for (std::size_t i = 0; i < input.pairs.size(); ++i) {
    profile += input.confidence[i] * input.pairs[i].body *
               input.pairs[i].inertial.transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(profile,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) <= 1e-9) {
    throw DegenerateGeometry("wahba_svd: profile matrix rank below 2");
  }
  Mat3 u_plus = svd.matrixU();
  u_plus.col(2) *= u_plus.determinant();
  Mat3 v_plus = svd.matrixV();
  v_plus.col(2) *= v_plus.determinant();
  return v_plus * u_plus.transpose();
}

/// Landmark-based position: P_y = sum(k_i (v_i^I - R_y v_i^B)) / sum(k_i).
inline Vec3 reconstruct_position(const Mat3& attitude,
                                 const MeasurementFrame& frame,
                                 const LandmarkSet& set) {
  set.validate();
  if (frame.landmark_body.size() != set.inertial.size()) {
    throw InvalidArgument("reconstruct_position: frame/set size mismatch");
  }
  std::vector<Vec3> candidates;
  candidates.reserve(set.inertial.size());
  for (std::size_t i = 0; i < set.inertial.size(); ++i) {
    candidates.push_back(set.inertial[i] - attitude * frame.landmark_body[i]);
  }
  return weighted_center(candidates, set.weights);
}

/// Full measured pose from one frame, with uniform Wahba confidences.
inline Pose reconstruct_pose(const MeasurementFrame& frame,
                             const LandmarkSet& set) {
  Mat3 attitude = wahba_svd(WahbaInput::uniform(frame.directions));
  return {attitude, reconstruct_position(attitude, frame, set)};
}

}  // namespace se3filter
