#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "se3filter/filters.hpp"
#include "se3filter/sensors.hpp"
#include "se3filter/truth.hpp"

namespace se3filter {

enum class FilterChoice { kDeterministic, kStochastic, kBoth };

inline const char* to_string(FilterChoice c) {
  switch (c) {
    case FilterChoice::kDeterministic: return "det";
    case FilterChoice::kStochastic: return "stoch";
    default: return "both";
  }
}

/// One sinusoidal channel as written in a scenario file. Phases are kept in
/// degrees so a config round-trips bit-exactly; conversion to radians
/// happens when the runtime SignalSpec is built.
struct SignalChannelConfig {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
  double phase_deg = 0.0;
};

struct LandmarkConfig {
  Vec3 inertial = Vec3::Zero();
  double weight = 1.0;
  Vec3 bias = Vec3::Zero();
  double stddev = 0.0;
};

struct DirectionConfig {
  Vec3 inertial = Vec3::Zero();
  Vec3 bias = Vec3::Zero();
  double stddev = 0.0;
};

struct InitialPoseConfig {
  double attitude_angle_deg = 0.0;
  Vec3 attitude_axis = Vec3::UnitX();
  Vec3 position = Vec3::Zero();

  Pose build() const {
    double n = attitude_axis.norm();
    if (n <= 0.0) throw ConfigError("attitude axis must be nonzero");
    return {angle_axis_to_rotation(deg2rad(attitude_angle_deg),
                                   attitude_axis / n),
            position};
  }
};

/// Full scenario description, loaded from the sectioned key-value format
/// documented in the README.
struct SimConfig {
  double duration_s = 30.0;
  double truth_dt_s = 1e-3;
  double sensor_rate_hz = 100.0;
  FilterChoice filters = FilterChoice::kBoth;
  std::vector<std::uint64_t> seeds = {1};

  std::array<SignalChannelConfig, 3> omega_signal;
  std::array<SignalChannelConfig, 3> velocity_signal;

  Vec3 gyro_bias = Vec3::Zero();
  double gyro_stddev = 0.0;
  Vec3 velocity_bias = Vec3::Zero();
  double velocity_stddev = 0.0;

  std::vector<LandmarkConfig> landmarks;
  std::vector<DirectionConfig> directions;

  FilterGains gains;

  InitialPoseConfig true_init;
  InitialPoseConfig estimate_init;

  SignalSpec signal_spec() const {
    SignalSpec s;
    for (int i = 0; i < 3; ++i) {
      s.omega[i] = {omega_signal[i].amplitude, omega_signal[i].frequency,
                    deg2rad(omega_signal[i].phase_deg)};
      s.velocity[i] = {velocity_signal[i].amplitude,
                       velocity_signal[i].frequency,
                       deg2rad(velocity_signal[i].phase_deg)};
    }
    return s;
  }

  LandmarkSet landmark_set() const {
    LandmarkSet set;
    for (const auto& l : landmarks) {
      set.inertial.push_back(l.inertial);
      set.weights.push_back(l.weight);
    }
    return set;
  }

  DirectionSet direction_set() const {
    DirectionSet set;
    for (const auto& d : directions) set.inertial.push_back(d.inertial);
    return set;
  }

  CorruptionSpec corruption(std::uint64_t seed) const {
    CorruptionSpec c;
    c.gyro_bias = gyro_bias;
    c.gyro_stddev = gyro_stddev;
    c.velocity_bias = velocity_bias;
    c.velocity_stddev = velocity_stddev;
    for (const auto& l : landmarks) {
      c.landmark_bias.push_back(l.bias);
      c.landmark_stddev.push_back(l.stddev);
    }
    for (const auto& d : directions) {
      c.direction_bias.push_back(d.bias);
      c.direction_stddev.push_back(d.stddev);
    }
    c.seed = seed;
    c.reset_streams();
    return c;
  }

  long frames() const {
    return std::lround(duration_s * sensor_rate_hz);
  }
  long substeps_per_frame() const {
    return std::lround(1.0 / (sensor_rate_hz * truth_dt_s));
  }

  void validate() const;
};

namespace detail {

struct ConfigValue {
  std::string text;
  int line = 0;
  mutable bool consumed = false;
};

class ConfigTree {
 public:
  ConfigTree(std::string source_name, const std::string& text)
      : name_(std::move(source_name)) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    bool any_content = false;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto semi = line.find(';');
      if (semi != std::string::npos) line.erase(semi);
      line = trim(line);
      if (line.empty()) continue;
      any_content = true;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail(line_no, "empty section name");
        sections_[section];
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(line_no, "empty key");
      if (section.empty()) fail(line_no, "key outside any [section]");
      auto [it, inserted] =
          sections_[section].emplace(key, ConfigValue{value, line_no});
      if (!inserted) fail(line_no, "duplicate key '" + section + "." + key + "'");
    }
    if (!any_content) {
      throw ConfigError(name_ + ": empty config");
    }
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  const ConfigValue& get(const std::string& section,
                         const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) {
      throw ConfigError(name_ + ": missing section [" + section + "]");
    }
    auto v = s->second.find(key);
    if (v == s->second.end()) {
      throw ConfigError(name_ + ": missing key '" + section + "." + key + "'");
    }
    v->second.consumed = true;
    return v->second;
  }

  double number(const std::string& section, const std::string& key) const {
    const ConfigValue& v = get(section, key);
    return parse_double(v.text, v.line, section + "." + key);
  }

  Vec3 vec3(const std::string& section, const std::string& key) const {
    const ConfigValue& v = get(section, key);
    auto parts = split(v.text);
    if (parts.size() != 3) {
      fail(v.line, "'" + section + "." + key + "' needs exactly 3 values");
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      out(i) = parse_double(parts[i], v.line, section + "." + key);
    }
    return out;
  }

  std::string word(const std::string& section, const std::string& key) const {
    return get(section, key).text;
  }

  std::vector<std::uint64_t> seed_list(const std::string& section,
                                       const std::string& key) const {
    const ConfigValue& v = get(section, key);
    std::vector<std::uint64_t> out;
    for (const auto& tok : split(v.text)) {
      try {
        out.push_back(std::stoull(tok));
      } catch (...) {
        fail(v.line, "'" + section + "." + key + "': bad seed '" + tok + "'");
      }
    }
    if (out.empty()) fail(v.line, "'" + section + "." + key + "' is empty");
    return out;
  }

  /// Any key never read by the loader is unknown; reject it by name.
  void reject_unconsumed() const {
    for (const auto& [section, keys] : sections_) {
      for (const auto& [key, value] : keys) {
        if (!value.consumed) {
          fail(value.line, "unknown key '" + section + "." + key + "'");
        }
      }
    }
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }

  double parse_double(const std::string& tok, int line,
                      const std::string& what) const {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (...) {
      fail(line, "'" + what + "': cannot parse number '" + tok + "'");
    }
    return 0.0;
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(name_ + ":" + std::to_string(line) + ": " + message);
  }

  std::string name_;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt(const Vec3& v) {
  return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}

}  // namespace detail

inline void SimConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(duration_s > 0.0, "run.duration_s must be > 0");
  require(truth_dt_s > 0.0, "run.truth_dt_s must be > 0");
  require(sensor_rate_hz > 0.0, "run.sensor_rate_hz must be > 0");
  require(!seeds.empty(), "run.seeds must list at least one seed");

  double per_frame = 1.0 / (sensor_rate_hz * truth_dt_s);
  require(std::abs(per_frame - std::lround(per_frame)) < 1e-9 &&
              std::lround(per_frame) >= 1,
          "sensor period must be an integer multiple of run.truth_dt_s");
  double total = duration_s * sensor_rate_hz;
  require(std::abs(total - std::lround(total)) < 1e-6,
          "run.duration_s must be an integer number of sensor periods");

  for (const auto& ch : omega_signal) {
    require(ch.frequency >= 0.0, "signals.omega_frequency_rad_s must be >= 0");
  }
  for (const auto& ch : velocity_signal) {
    require(ch.frequency >= 0.0,
            "signals.velocity_frequency_rad_s must be >= 0");
  }

  require(gyro_stddev >= 0.0, "velocity_sensors.gyro_stddev must be >= 0");
  require(velocity_stddev >= 0.0,
          "velocity_sensors.velocity_stddev must be >= 0");

  require(!landmarks.empty(), "landmarks.count must be >= 1");
  for (const auto& l : landmarks) {
    require(l.weight > 0.0, "landmarks.weight must be > 0");
    require(l.stddev >= 0.0, "landmarks.stddev must be >= 0");
  }
  require(directions.size() >= 2, "directions.count must be >= 2");
  for (const auto& d : directions) {
    require(d.stddev >= 0.0, "directions.stddev must be >= 0");
  }
  direction_set().validate();

  gains.validate_deterministic();
  if (filters != FilterChoice::kDeterministic) {
    if (!(gains.pi_bar > 0 && gains.k_sigma > 0 && gains.epsilon > 0)) {
      throw ConfigError("invalid config: gains.pi_bar, gains.k_sigma and "
                        "gains.epsilon must be > 0 for the stochastic filter");
    }
    if (!(gains.k_p * gains.k_w > 4.5)) {
      throw ConfigError(
          "invalid config: gains.k_p*k_w must exceed 4.5 for the stochastic "
          "filter (got " +
          detail::fmt(gains.k_p * gains.k_w) + ")");
    }
  }
  require(true_init.attitude_axis.norm() > 0.0,
          "initial.true_attitude_axis must be nonzero");
  require(estimate_init.attitude_axis.norm() > 0.0,
          "initial.estimate_attitude_axis must be nonzero");
}

inline SimConfig parse_config(const std::string& text,
                              const std::string& source_name = "<config>") {
  detail::ConfigTree tree(source_name, text);
  SimConfig cfg;

  cfg.duration_s = tree.number("run", "duration_s");
  cfg.truth_dt_s = tree.number("run", "truth_dt_s");
  cfg.sensor_rate_hz = tree.number("run", "sensor_rate_hz");
  if (tree.has("run", "filters")) {
    std::string f = tree.word("run", "filters");
    if (f == "det") cfg.filters = FilterChoice::kDeterministic;
    else if (f == "stoch") cfg.filters = FilterChoice::kStochastic;
    else if (f == "both") cfg.filters = FilterChoice::kBoth;
    else throw ConfigError(source_name + ": run.filters must be det|stoch|both");
  }
  if (tree.has("run", "seeds")) cfg.seeds = tree.seed_list("run", "seeds");

  auto channels = [&tree](const std::string& prefix,
                          std::array<SignalChannelConfig, 3>& out) {
    Vec3 amp = tree.vec3("signals", prefix + "_amplitude");
    Vec3 freq = tree.vec3("signals", prefix + "_frequency_rad_s");
    Vec3 phase = tree.vec3("signals", prefix + "_phase_deg");
    for (int i = 0; i < 3; ++i) out[i] = {amp(i), freq(i), phase(i)};
  };
  channels("omega", cfg.omega_signal);
  channels("velocity", cfg.velocity_signal);

  cfg.gyro_bias = tree.vec3("velocity_sensors", "gyro_bias");
  cfg.gyro_stddev = tree.number("velocity_sensors", "gyro_stddev");
  cfg.velocity_bias = tree.vec3("velocity_sensors", "velocity_bias");
  cfg.velocity_stddev = tree.number("velocity_sensors", "velocity_stddev");

  int n_l = int(tree.number("landmarks", "count"));
  for (int i = 1; i <= n_l; ++i) {
    std::string sfx = "_" + std::to_string(i);
    LandmarkConfig l;
    l.inertial = tree.vec3("landmarks", "inertial" + sfx);
    l.weight = tree.number("landmarks", "weight" + sfx);
    l.bias = tree.vec3("landmarks", "bias" + sfx);
    l.stddev = tree.number("landmarks", "stddev" + sfx);
    cfg.landmarks.push_back(l);
  }

  int n_r = int(tree.number("directions", "count"));
  for (int i = 1; i <= n_r; ++i) {
    std::string sfx = "_" + std::to_string(i);
    DirectionConfig d;
    d.inertial = tree.vec3("directions", "inertial" + sfx);
    d.bias = tree.vec3("directions", "bias" + sfx);
    d.stddev = tree.number("directions", "stddev" + sfx);
    cfg.directions.push_back(d);
  }

  cfg.gains.gamma = tree.number("gains", "gamma");
  cfg.gains.pi_bar = tree.number("gains", "pi_bar");
  cfg.gains.k_b = tree.number("gains", "k_b");
  cfg.gains.k_sigma = tree.number("gains", "k_sigma");
  cfg.gains.k_p = tree.number("gains", "k_p");
  cfg.gains.k_w = tree.number("gains", "k_w");
  cfg.gains.epsilon = tree.number("gains", "epsilon");

  cfg.true_init.attitude_angle_deg =
      tree.number("initial", "true_attitude_angle_deg");
  cfg.true_init.attitude_axis = tree.vec3("initial", "true_attitude_axis");
  cfg.true_init.position = tree.vec3("initial", "true_position");
  cfg.estimate_init.attitude_angle_deg =
      tree.number("initial", "estimate_attitude_angle_deg");
  cfg.estimate_init.attitude_axis =
      tree.vec3("initial", "estimate_attitude_axis");
  cfg.estimate_init.position = tree.vec3("initial", "estimate_position");

  tree.reject_unconsumed();
  cfg.validate();
  return cfg;
}

inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

/// Writes a config back out with full precision; parse(serialize(c)) == c.
inline std::string serialize_config(const SimConfig& cfg) {
  using detail::fmt;
  std::ostringstream out;
  out << "[run]\n";
  out << "duration_s = " << fmt(cfg.duration_s) << "\n";
  out << "truth_dt_s = " << fmt(cfg.truth_dt_s) << "\n";
  out << "sensor_rate_hz = " << fmt(cfg.sensor_rate_hz) << "\n";
  out << "filters = " << to_string(cfg.filters) << "\n";
  out << "seeds =";
  for (auto s : cfg.seeds) out << " " << s;
  out << "\n\n[signals]\n";
  auto channels = [&out](const std::string& prefix,
                         const std::array<SignalChannelConfig, 3>& ch) {
    out << prefix << "_amplitude = " << fmt(ch[0].amplitude) << " "
        << fmt(ch[1].amplitude) << " " << fmt(ch[2].amplitude) << "\n";
    out << prefix << "_frequency_rad_s = " << fmt(ch[0].frequency) << " "
        << fmt(ch[1].frequency) << " " << fmt(ch[2].frequency) << "\n";
    out << prefix << "_phase_deg = " << fmt(ch[0].phase_deg) << " "
        << fmt(ch[1].phase_deg) << " " << fmt(ch[2].phase_deg) << "\n";
  };
  channels("omega", cfg.omega_signal);
  channels("velocity", cfg.velocity_signal);
  out << "\n[velocity_sensors]\n";
  out << "gyro_bias = " << fmt(cfg.gyro_bias) << "\n";
  out << "gyro_stddev = " << fmt(cfg.gyro_stddev) << "\n";
  out << "velocity_bias = " << fmt(cfg.velocity_bias) << "\n";
  out << "velocity_stddev = " << fmt(cfg.velocity_stddev) << "\n";
  out << "\n[landmarks]\n";
  out << "count = " << cfg.landmarks.size() << "\n";
  for (std::size_t i = 0; i < cfg.landmarks.size(); ++i) {
    std::string sfx = "_" + std::to_string(i + 1);
    out << "inertial" << sfx << " = " << fmt(cfg.landmarks[i].inertial) << "\n";
    out << "weight" << sfx << " = " << fmt(cfg.landmarks[i].weight) << "\n";
    out << "bias" << sfx << " = " << fmt(cfg.landmarks[i].bias) << "\n";
    out << "stddev" << sfx << " = " << fmt(cfg.landmarks[i].stddev) << "\n";
  }
  out << "\n[directions]\n";
  out << "count = " << cfg.directions.size() << "\n";
  for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
    std::string sfx = "_" + std::to_string(i + 1);
    out << "inertial" << sfx << " = " << fmt(cfg.directions[i].inertial) << "\n";
    out << "bias" << sfx << " = " << fmt(cfg.directions[i].bias) << "\n";
    out << "stddev" << sfx << " = " << fmt(cfg.directions[i].stddev) << "\n";
  }
  out << "\n[gains]\n";
  out << "gamma = " << fmt(cfg.gains.gamma) << "\n";
  out << "pi_bar = " << fmt(cfg.gains.pi_bar) << "\n";
  out << "k_b = " << fmt(cfg.gains.k_b) << "\n";
  out << "k_sigma = " << fmt(cfg.gains.k_sigma) << "\n";
  out << "k_p = " << fmt(cfg.gains.k_p) << "\n";
  out << "k_w = " << fmt(cfg.gains.k_w) << "\n";
  out << "epsilon = " << fmt(cfg.gains.epsilon) << "\n";
  out << "\n[initial]\n";
  out << "true_attitude_angle_deg = " << fmt(cfg.true_init.attitude_angle_deg)
      << "\n";
  out << "true_attitude_axis = " << fmt(cfg.true_init.attitude_axis) << "\n";
  out << "true_position = " << fmt(cfg.true_init.position) << "\n";
  out << "estimate_attitude_angle_deg = "
      << fmt(cfg.estimate_init.attitude_angle_deg) << "\n";
  out << "estimate_attitude_axis = " << fmt(cfg.estimate_init.attitude_axis)
      << "\n";
  out << "estimate_position = " << fmt(cfg.estimate_init.position) << "\n";
  return out.str();
}

}  // namespace se3filter
