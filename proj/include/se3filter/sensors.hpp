#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "se3filter/lie.hpp"

namespace se3filter {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

/// Seed for one sensor's noise stream, mixed from the master seed and a
/// stable per-sensor identifier so that adding or reordering other sensors
/// never shifts this sensor's draws.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view sensor_id) {
  return detail::splitmix64(master ^ detail::fnv1a64(sensor_id));
}

/// Deterministic stream of standard normal draws.
class GaussianStream {
 public:
  GaussianStream() : GaussianStream(0) {}
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() { return normal_(gen_); }
  Vec3 next_vec3() {
    double a = next(), b = next(), c = next();
    return {a, b, c};
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Known inertial feature points with per-point confidence weights.
struct LandmarkSet {
  std::vector<Vec3> inertial;
  std::vector<double> weights;

  void validate() const {
    if (inertial.empty()) {
      throw InvalidArgument("LandmarkSet: at least one landmark required");
    }
    if (weights.size() != inertial.size()) {
      throw InvalidArgument("LandmarkSet: weight count mismatch");
    }
    for (double w : weights) {
      if (!(w > 0.0)) throw InvalidArgument("LandmarkSet: weights must be > 0");
    }
  }
};

/// Known inertial reference directions. Two non-collinear members are the
/// minimum; a third is synthesized by cross products at measurement time.
struct DirectionSet {
  std::vector<Vec3> inertial;

  void validate() const {
    if (inertial.size() < 2) {
      throw InvalidArgument("DirectionSet: at least two directions required");
    }
    bool spanning = false;
    for (std::size_t i = 0; i + 1 < inertial.size() && !spanning; ++i) {
      for (std::size_t j = i + 1; j < inertial.size() && !spanning; ++j) {
        if (inertial[i].cross(inertial[j]).norm() >
            1e-9 * inertial[i].norm() * inertial[j].norm()) {
          spanning = true;
        }
      }
    }
    if (!spanning) throw DegenerateGeometry("DirectionSet: directions are collinear");
  }
};

/// Bias and noise configuration for every sensor, together with the seeded
/// noise streams. A CorruptionSpec owns its streams; copies replay
/// identically from the copied state.
struct CorruptionSpec {
  Vec3 gyro_bias = Vec3::Zero();
  double gyro_stddev = 0.0;
  Vec3 velocity_bias = Vec3::Zero();
  double velocity_stddev = 0.0;
  std::vector<Vec3> landmark_bias;
  std::vector<double> landmark_stddev;
  std::vector<Vec3> direction_bias;
  std::vector<double> direction_stddev;
  std::uint64_t seed = 0;

  GaussianStream gyro_stream;
  GaussianStream velocity_stream;
  std::vector<GaussianStream> landmark_streams;
  std::vector<GaussianStream> direction_streams;

  /// Derives one independent substream per sensor from `seed`.
  void reset_streams() {
    gyro_stream = GaussianStream(substream_seed(seed, "gyro"));
    velocity_stream = GaussianStream(substream_seed(seed, "velocity"));
    landmark_streams.clear();
    std::size_t n_l = std::max(landmark_bias.size(), landmark_stddev.size());
    for (std::size_t i = 0; i < n_l; ++i) {
      landmark_streams.emplace_back(
          substream_seed(seed, "landmark:" + std::to_string(i)));
    }
    direction_streams.clear();
    std::size_t n_r = std::max(direction_bias.size(), direction_stddev.size());
    for (std::size_t i = 0; i < n_r; ++i) {
      direction_streams.emplace_back(
          substream_seed(seed, "direction:" + std::to_string(i)));
    }
    streams_ready = true;
  }

  void ensure_streams() {
    if (!streams_ready) reset_streams();
  }

 private:
  bool streams_ready = false;
};

/// One normalized vector observation: body-frame reading paired with the
/// inertial reference it corresponds to.
struct DirectionPair {
  Vec3 body;
  Vec3 inertial;
};

struct DirectionMeasurement {
  std::vector<DirectionPair> pairs;  // normalized, includes a synthesized third
  std::vector<Vec3> raw_body;        // corrupted readings of the physical sensors
};

/// Everything one sampling instant delivers to the estimator.
struct MeasurementFrame {
  double t = 0.0;
  std::vector<Vec3> landmark_body;      // raw corrupted body-frame landmarks
  std::vector<DirectionPair> directions;
  std::vector<Vec3> direction_raw_body;
  Twist velocity;                       // biased, noisy twist reading
};

/// Body-frame landmark readings v = R^T (v_I - P) + bias + noise.
inline std::vector<Vec3> measure_landmarks(const Pose& truth,
                                           const LandmarkSet& set,
                                           CorruptionSpec& c) {
  set.validate();
  c.ensure_streams();
  std::vector<Vec3> out;
  out.reserve(set.inertial.size());
  for (std::size_t i = 0; i < set.inertial.size(); ++i) {
    Vec3 clean = truth.R.transpose() * (set.inertial[i] - truth.p);
    Vec3 bias = i < c.landmark_bias.size() ? c.landmark_bias[i] : Vec3::Zero();
    double sd = i < c.landmark_stddev.size() ? c.landmark_stddev[i] : 0.0;
    Vec3 noise = sd > 0.0 ? Vec3(sd * c.landmark_streams[i].next_vec3())
                          : Vec3::Zero();
    out.push_back(clean + bias + noise);
  }
  return out;
}

/// Direction readings v = R^T v_I + bias + noise. With exactly two physical
/// sensors the third pair comes from cross products: the inertial side before
/// corruption, the body side after, so its noise is correlated with the
/// first two. Both sides are normalized.
inline DirectionMeasurement measure_directions(const Pose& truth,
                                               const DirectionSet& set,
                                               CorruptionSpec& c) {
  set.validate();
  c.ensure_streams();
  DirectionMeasurement out;
  std::vector<Vec3> body;
  std::vector<Vec3> inertial = set.inertial;
  for (std::size_t i = 0; i < set.inertial.size(); ++i) {
    Vec3 clean = truth.R.transpose() * set.inertial[i];
    Vec3 bias = i < c.direction_bias.size() ? c.direction_bias[i] : Vec3::Zero();
    double sd = i < c.direction_stddev.size() ? c.direction_stddev[i] : 0.0;
    Vec3 noise = sd > 0.0 ? Vec3(sd * c.direction_streams[i].next_vec3())
                          : Vec3::Zero();
    body.push_back(clean + bias + noise);
  }
  out.raw_body = body;
  if (set.inertial.size() == 2) {
    inertial.push_back(set.inertial[0].cross(set.inertial[1]));
    body.push_back(body[0].cross(body[1]));
  }
  for (std::size_t i = 0; i < body.size(); ++i) {
    double bn = body[i].norm();
    double in = inertial[i].norm();
    if (bn < 1e-12 || in < 1e-12) {
      throw DegenerateGeometry("measure_directions: vanishing direction vector");
    }
    out.pairs.push_back({body[i] / bn, inertial[i] / in});
  }
  return out;
}

/// Confidence-weighted center sum(k_i v_i) / sum(k_i).
inline Vec3 weighted_center(const std::vector<Vec3>& vectors,
                            const std::vector<double>& weights) {
  if (vectors.empty() || vectors.size() != weights.size()) {
    throw InvalidArgument("weighted_center: empty or mismatched inputs");
  }
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw InvalidArgument("weighted_center: weights must be > 0");
    }
    acc += weights[i] * vectors[i];
    total += weights[i];
  }
  return acc / total;
}

/// Biased, noisy twist reading at the sensor rate 1/dt. The configured
/// standard deviations are per sample at that rate; the equivalent
/// continuous-time gain is Q_ii = stddev_i * sqrt(dt).
inline Twist measure_velocity(double t, const Twist& truth, CorruptionSpec& c,
                              double dt) {
  (void)t;
  if (!(dt > 0.0)) throw InvalidArgument("measure_velocity: dt must be > 0");
  c.ensure_streams();
  Twist out;
  out.omega = truth.omega + c.gyro_bias +
              (c.gyro_stddev > 0.0 ? Vec3(c.gyro_stddev * c.gyro_stream.next_vec3())
                                   : Vec3::Zero());
  out.v = truth.v + c.velocity_bias +
          (c.velocity_stddev > 0.0
               ? Vec3(c.velocity_stddev * c.velocity_stream.next_vec3())
               : Vec3::Zero());
  return out;
}

/// Samples every sensor once and assembles the frame.
inline MeasurementFrame measure_frame(double t, const Pose& truth,
                                      const Twist& true_velocity,
                                      const LandmarkSet& landmarks,
                                      const DirectionSet& directions,
                                      CorruptionSpec& c, double dt) {
  MeasurementFrame frame;
  frame.t = t;
  frame.landmark_body = measure_landmarks(truth, landmarks, c);
  DirectionMeasurement dirs = measure_directions(truth, directions, c);
  frame.directions = std::move(dirs.pairs);
  frame.direction_raw_body = std::move(dirs.raw_body);
  frame.velocity = measure_velocity(t, true_velocity, c, dt);
  return frame;
}

}  // namespace se3filter
