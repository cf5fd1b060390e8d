#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "se3filter/config.hpp"
#include "se3filter/recon.hpp"

namespace se3filter {

/// One time-series sample of a filter run. `position_error` is P - Phat;
/// the group error P - Rtilde*Phat, the quantity the estimator actually
/// regulates, is kept alongside as a diagnostic.
struct StepRow {
  double t = 0.0;
  Vec3 p_true = Vec3::Zero();
  Vec3 p_hat = Vec3::Zero();
  Vec3 euler_true = Vec3::Zero();  // roll, pitch, yaw (rad)
  Vec3 euler_hat = Vec3::Zero();
  double attitude_distance = 0.0;  // |R Rhat^T|_I
  Vec3 position_error = Vec3::Zero();
  Vec6 bias_hat = Vec6::Zero();
  Vec6 sigma_hat = Vec6::Zero();
};

struct RunSeries {
  FilterChoice kind = FilterChoice::kStochastic;  // det or stoch
  std::vector<StepRow> rows;
  std::vector<double> potential;           // Lyapunov diagnostic, true errors
  std::vector<Vec3> position_error_group;  // P - Rtilde*Phat
};

/// Per-frame measurement log kept for the figure files and input statistics.
struct FrameLog {
  double t = 0.0;
  Twist twist_true;
  Twist twist_meas;
  std::vector<Vec3> landmark_true;
  std::vector<Vec3> landmark_meas;
  std::vector<Vec3> direction_true;
  std::vector<Vec3> direction_meas;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<FrameLog> frames;
  std::optional<RunSeries> det;
  std::optional<RunSeries> stoch;
};

struct AxisStats {
  Vec3 mean = Vec3::Zero();
  Vec3 stddev = Vec3::Zero();
};

struct SummaryStats {
  long samples = 0;
  double att_mean = 0.0;
  double att_std = 0.0;
  AxisStats position_error;        // P - Phat
  AxisStats position_error_group;  // P - Rtilde*Phat
};

struct InputStats {
  AxisStats landmark1;
  AxisStats direction1;
  AxisStats direction2;
  AxisStats gyro;
  AxisStats velocity;
};

namespace detail {

class Welford3 {
 public:
  void add(const Vec3& v) {
    ++n_;
    Vec3 d = v - mean_;
    mean_ += d / double(n_);
    m2_ += d.cwiseProduct(v - mean_);
  }
  long count() const { return n_; }
  AxisStats stats() const {
    AxisStats s;
    s.mean = mean_;
    if (n_ > 1) s.stddev = (m2_ / double(n_ - 1)).cwiseSqrt();
    return s;
  }

 private:
  long n_ = 0;
  Vec3 mean_ = Vec3::Zero();
  Vec3 m2_ = Vec3::Zero();
};

class Welford1 {
 public:
  void add(double v) {
    ++n_;
    double d = v - mean_;
    mean_ += d / double(n_);
    m2_ += d * (v - mean_);
  }
  long count() const { return n_; }
  double mean() const { return mean_; }
  double stddev() const { return n_ > 1 ? std::sqrt(m2_ / double(n_ - 1)) : 0.0; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace detail

/// Statistics window: [1 s, duration] when the run is long enough,
/// otherwise the whole run, endpoints included, at the sensor rate.
inline double summary_window_start(double duration_s) {
  return duration_s >= 1.0 ? 1.0 : 0.0;
}

inline SummaryStats summarize_series(const RunSeries& series,
                                     double duration_s) {
  double t0 = summary_window_start(duration_s);
  detail::Welford1 att;
  detail::Welford3 pos, pos_group;
  for (std::size_t i = 0; i < series.rows.size(); ++i) {
    const StepRow& row = series.rows[i];
    if (row.t < t0 - 1e-9) continue;
    att.add(row.attitude_distance);
    pos.add(row.position_error);
    pos_group.add(series.position_error_group[i]);
  }
  SummaryStats out;
  out.samples = att.count();
  out.att_mean = att.mean();
  out.att_std = att.stddev();
  out.position_error = pos.stats();
  out.position_error_group = pos_group.stats();
  return out;
}

/// One full simulation: truth propagation at the fine step, measurement
/// synthesis and pose reconstruction at the sensor rate, and the selected
/// filter(s) consuming the identical measurement stream.
inline RunRecord run_once(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SignalSpec signals = cfg.signal_spec();
  LandmarkSet landmarks = cfg.landmark_set();
  DirectionSet directions = cfg.direction_set();
  CorruptionSpec corruption = cfg.corruption(seed);
  double frame_dt = 1.0 / cfg.sensor_rate_hz;
  long substeps = cfg.substeps_per_frame();
  long frames = cfg.frames();

  bool want_det = cfg.filters != FilterChoice::kStochastic;
  bool want_stoch = cfg.filters != FilterChoice::kDeterministic;

  PoseIntegrator truth;
  truth.pose = cfg.true_init.build();
  Pose estimate0 = cfg.estimate_init.build();

  FilterState det_state, stoch_state;
  det_state.pose = estimate0;
  stoch_state.pose = estimate0;

  Vec6 true_bias;
  true_bias << cfg.gyro_bias, cfg.velocity_bias;
  Vec6 sigma_true;
  double qg = cfg.gyro_stddev * std::sqrt(frame_dt);
  double qv = cfg.velocity_stddev * std::sqrt(frame_dt);
  sigma_true << Vec3::Constant(qg * qg), Vec3::Constant(qv * qv);

  RunRecord record;
  record.seed = seed;
  if (want_det) record.det = RunSeries{FilterChoice::kDeterministic, {}, {}, {}};
  if (want_stoch) record.stoch = RunSeries{FilterChoice::kStochastic, {}, {}, {}};

  auto record_state = [&](RunSeries& series, const FilterState& state,
                          double t, bool stochastic) {
    StepRow row;
    row.t = t;
    row.p_true = truth.pose.p;
    row.p_hat = state.pose.p;
    row.euler_true = euler_zyx(truth.pose.R);
    row.euler_hat = euler_zyx(state.pose.R);
    Mat3 r_tilde = truth.pose.R * state.pose.R.transpose();
    row.attitude_distance = distance_so3(r_tilde);
    row.position_error = truth.pose.p - state.pose.p;
    row.bias_hat = state.bias;
    row.sigma_hat = state.sigma;
    series.rows.push_back(row);
    series.position_error_group.push_back(truth.pose.p - r_tilde * state.pose.p);

    ErrorDiagnostics err = pose_error(truth.pose, state.pose);
    double v = stochastic
                   ? lyapunov_stoch(err, true_bias - state.bias,
                                    sigma_true - state.sigma, cfg.gains)
                   : lyapunov_det(err, true_bias - state.bias, cfg.gains);
    series.potential.push_back(v);
  };

  try {
    if (record.det) record_state(*record.det, det_state, 0.0, false);
    if (record.stoch) record_state(*record.stoch, stoch_state, 0.0, true);
  } catch (const SingularAttitude& e) {
    throw SingularAttitude(std::string("t=0 s: ") + e.what());
  }

  // Zero-order hold: each sensor frame is sampled at the start of the
  // update interval and held while truth sub-steps across it.
  for (long k = 1; k <= frames; ++k) {
    double t = k * frame_dt;
    double t_sample = (k - 1) * frame_dt;
    try {
      Twist twist_now = true_twist(t_sample, signals);
      MeasurementFrame frame = measure_frame(t_sample, truth.pose, twist_now,
                                             landmarks, directions, corruption,
                                             frame_dt);
      Pose measured = reconstruct_pose(frame, landmarks);

      FrameLog log;
      log.t = t_sample;
      log.twist_true = twist_now;
      log.twist_meas = frame.velocity;
      for (std::size_t i = 0; i < landmarks.inertial.size(); ++i) {
        log.landmark_true.push_back(truth.pose.R.transpose() *
                                    (landmarks.inertial[i] - truth.pose.p));
        log.landmark_meas.push_back(frame.landmark_body[i]);
      }
      for (std::size_t i = 0; i < directions.inertial.size(); ++i) {
        log.direction_true.push_back(truth.pose.R.transpose() *
                                     directions.inertial[i]);
        log.direction_meas.push_back(frame.direction_raw_body[i]);
      }
      record.frames.push_back(std::move(log));

      for (long s = 0; s < substeps; ++s) {
        double ts = t_sample + s * cfg.truth_dt_s;
        truth.advance(true_twist(ts, signals), cfg.truth_dt_s);
      }

      if (record.det) {
        det_state = det_step(det_state, measured, frame.velocity, cfg.gains,
                             frame_dt);
        record_state(*record.det, det_state, t, false);
      }
      if (record.stoch) {
        stoch_state = stoch_step(stoch_state, measured, frame.velocity,
                                 cfg.gains, frame_dt);
        record_state(*record.stoch, stoch_state, t, true);
      }
    } catch (const SingularAttitude& e) {
      throw SingularAttitude("t=" + detail::csv_num(t) + " s: " + e.what());
    } catch (const DegenerateGeometry& e) {
      throw DegenerateGeometry("t=" + detail::csv_num(t) + " s: " + e.what());
    }
  }
  return record;
}

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct MonteCarloResult {
  std::vector<RunRecord> records;  // successful runs, in seed order
  std::vector<SeedFailure> failures;
};

/// Fans the seeds out across workers; the gathering order (and therefore
/// every downstream statistic and file) depends only on the seed list.
inline MonteCarloResult run_montecarlo(const SimConfig& cfg,
                                       const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InvalidArgument("run_montecarlo: no seeds");
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  MonteCarloResult result;
  std::vector<std::future<RunRecord>> pending;
  std::vector<std::uint64_t> pending_seed;

  auto drain = [&]() {
    for (std::size_t i = 0; i < pending.size(); ++i) {
      try {
        result.records.push_back(pending[i].get());
      } catch (const std::exception& e) {
        result.failures.push_back({pending_seed[i], e.what()});
      }
    }
    pending.clear();
    pending_seed.clear();
  };

  for (std::uint64_t seed : seeds) {
    pending.push_back(std::async(std::launch::async, run_once, std::cref(cfg),
                                 seed));
    pending_seed.push_back(seed);
    if (pending.size() >= workers) drain();
  }
  drain();
  return result;
}

inline InputStats input_statistics(const MonteCarloResult& result) {
  detail::Welford3 l1, d1, d2, gy, ve;
  for (const RunRecord& rec : result.records) {
    for (const FrameLog& f : rec.frames) {
      if (!f.landmark_meas.empty()) {
        l1.add(f.landmark_meas[0] - f.landmark_true[0]);
      }
      if (f.direction_meas.size() >= 2) {
        d1.add(f.direction_meas[0] - f.direction_true[0]);
        d2.add(f.direction_meas[1] - f.direction_true[1]);
      }
      gy.add(f.twist_meas.omega - f.twist_true.omega);
      ve.add(f.twist_meas.v - f.twist_true.v);
    }
  }
  return {l1.stats(), d1.stats(), d2.stats(), gy.stats(), ve.stats()};
}

/// Pooled statistics across every successful run of one filter.
inline SummaryStats pooled_summary(const MonteCarloResult& result,
                                   FilterChoice kind, double duration_s) {
  double t0 = summary_window_start(duration_s);
  detail::Welford1 att;
  detail::Welford3 pos, pos_group;
  for (const RunRecord& rec : result.records) {
    const std::optional<RunSeries>& series =
        kind == FilterChoice::kDeterministic ? rec.det : rec.stoch;
    if (!series) continue;
    for (std::size_t i = 0; i < series->rows.size(); ++i) {
      if (series->rows[i].t < t0 - 1e-9) continue;
      att.add(series->rows[i].attitude_distance);
      pos.add(series->rows[i].position_error);
      pos_group.add(series->position_error_group[i]);
    }
  }
  SummaryStats out;
  out.samples = att.count();
  out.att_mean = att.mean();
  out.att_std = att.stddev();
  out.position_error = pos.stats();
  out.position_error_group = pos_group.stats();
  return out;
}

namespace detail {

inline const char* kSeriesHeader =
    "t,x,y,z,xh,yh,zh,roll,pitch,yaw,rollh,pitchh,yawh,attdist,"
    "ex,ey,ez,bh1,bh2,bh3,bh4,bh5,bh6,sh1,sh2,sh3,sh4,sh5,sh6";

inline void write_series_csv(const std::filesystem::path& path,
                             const RunSeries& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kSeriesHeader << "\n";
  for (const StepRow& r : series.rows) {
    out << csv_num(r.t);
    for (int i = 0; i < 3; ++i) out << ',' << csv_num(r.p_true(i));
    for (int i = 0; i < 3; ++i) out << ',' << csv_num(r.p_hat(i));
    for (int i = 0; i < 3; ++i) out << ',' << csv_num(r.euler_true(i));
    for (int i = 0; i < 3; ++i) out << ',' << csv_num(r.euler_hat(i));
    out << ',' << csv_num(r.attitude_distance);
    for (int i = 0; i < 3; ++i) out << ',' << csv_num(r.position_error(i));
    for (int i = 0; i < 6; ++i) out << ',' << csv_num(r.bias_hat(i));
    for (int i = 0; i < 6; ++i) out << ',' << csv_num(r.sigma_hat(i));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string series_filename(std::uint64_t seed, FilterChoice kind) {
  return "run_s" + std::to_string(seed) + "_" + to_string(kind) + ".csv";
}

inline void append_stats_rows(std::ostream& out, const std::string& scope,
                              const std::string& filter,
                              const SummaryStats& s) {
  out << scope << ',' << filter << ",attitude_distance,," << csv_num(s.att_mean)
      << ',' << csv_num(s.att_std) << '\n';
  const char* axes = "xyz";
  for (int i = 0; i < 3; ++i) {
    out << scope << ',' << filter << ",position_error," << axes[i] << ','
        << csv_num(s.position_error.mean(i)) << ','
        << csv_num(s.position_error.stddev(i)) << '\n';
  }
  for (int i = 0; i < 3; ++i) {
    out << scope << ',' << filter << ",position_error_group," << axes[i] << ','
        << csv_num(s.position_error_group.mean(i)) << ','
        << csv_num(s.position_error_group.stddev(i)) << '\n';
  }
}

inline void append_input_rows(std::ostream& out, const std::string& name,
                              const AxisStats& s) {
  const char* axes = "xyz";
  for (int i = 0; i < 3; ++i) {
    out << "input,," << name << ',' << axes[i] << ',' << csv_num(s.mean(i))
        << ',' << csv_num(s.stddev(i)) << '\n';
  }
}

/// Minimal SVG line chart for one figure CSV: every non-time column as a
/// polyline over t.
inline void write_svg_plot(const std::filesystem::path& path,
                           const std::string& title,
                           const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns) {
  if (columns.size() < 2 || columns[0].empty()) return;
  const double width = 920, height = 480, ml = 60, mr = 160, mt = 40, mb = 40;
  const std::vector<std::string> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
      "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#ff9896",
      "#98df8a", "#c5b0d5", "#ffbb78", "#c49c94", "#f7b6d2", "#9edae5"};
  double tmin = columns[0].front(), tmax = columns[0].back();
  double ymin = 1e300, ymax = -1e300;
  for (std::size_t c = 1; c < columns.size(); ++c) {
    for (double v : columns[c]) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymax > ymin)) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double t) {
    return ml + (t - tmin) / (tmax - tmin) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << ml << "' y='24' font-family='sans-serif' "
         "font-size='15'>" << title << "</text>\n";
  out << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr
      << "' height='" << height - mt - mb
      << "' fill='none' stroke='#888'/>\n";
  for (double f : {0.0, 0.5, 1.0}) {
    double v = ymin + f * (ymax - ymin);
    out << "<text x='4' y='" << sy(v) + 4
        << "' font-family='sans-serif' font-size='11'>" << csv_num(v)
        << "</text>\n";
    double t = tmin + f * (tmax - tmin);
    out << "<text x='" << sx(t) - 8 << "' y='" << height - mb + 16
        << "' font-family='sans-serif' font-size='11'>" << csv_num(t)
        << "</text>\n";
  }
  for (std::size_t c = 1; c < columns.size(); ++c) {
    const std::string& color = palette[(c - 1) % palette.size()];
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1' points='";
    std::size_t stride = std::max<std::size_t>(1, columns[0].size() / 2000);
    for (std::size_t i = 0; i < columns[0].size(); i += stride) {
      out << sx(columns[0][i]) << ',' << sy(columns[c][i]) << ' ';
    }
    out << "'/>\n";
    out << "<text x='" << width - mr + 8 << "' y='" << mt + 14 * c
        << "' font-family='sans-serif' font-size='11' fill='" << color << "'>"
        << names[c] << "</text>\n";
  }
  out << "</svg>\n";
}

struct FigureTable {
  std::vector<std::string> names;            // incl. leading "t"
  std::vector<std::vector<double>> columns;  // same order
};

inline void write_figure(const std::filesystem::path& dir,
                         const std::string& stem, const FigureTable& table,
                         bool plots) {
  std::filesystem::path csv = dir / (stem + ".csv");
  std::ofstream out(csv);
  if (!out) throw IoError("cannot write " + csv.string());
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    out << (i ? "," : "") << table.names[i];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.columns[0].size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << csv_num(table.columns[c][r]);
    }
    out << '\n';
  }
  if (plots) {
    write_svg_plot(dir / (stem + ".svg"), stem, table.names, table.columns);
  }
}

}  // namespace detail

/// Writes all documented outputs: one time-series CSV per (seed, filter),
/// `summary.csv` with input and output statistics, and six plot-ready
/// figure files from the first run (optionally rendered to SVG).
inline void emit_outputs(const MonteCarloResult& result, const SimConfig& cfg,
                         const std::filesystem::path& outdir,
                         bool plots = false) {
  if (result.records.empty()) {
    throw InvalidArgument("emit_outputs: no successful runs to write");
  }
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());

  for (const RunRecord& rec : result.records) {
    if (rec.det) {
      detail::write_series_csv(
          outdir / detail::series_filename(rec.seed, FilterChoice::kDeterministic),
          *rec.det);
    }
    if (rec.stoch) {
      detail::write_series_csv(
          outdir / detail::series_filename(rec.seed, FilterChoice::kStochastic),
          *rec.stoch);
    }
  }

  // summary.csv: input error statistics plus per-seed and pooled output
  // statistics for each filter that ran.
  {
    std::filesystem::path path = outdir / "summary.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "scope,filter,quantity,axis,mean,std\n";
    InputStats in = input_statistics(result);
    detail::append_input_rows(out, "landmark1_error", in.landmark1);
    detail::append_input_rows(out, "direction1_error", in.direction1);
    detail::append_input_rows(out, "direction2_error", in.direction2);
    detail::append_input_rows(out, "gyro_error", in.gyro);
    detail::append_input_rows(out, "velocity_error", in.velocity);
    for (FilterChoice kind :
         {FilterChoice::kDeterministic, FilterChoice::kStochastic}) {
      bool any = false;
      for (const RunRecord& rec : result.records) {
        const std::optional<RunSeries>& series =
            kind == FilterChoice::kDeterministic ? rec.det : rec.stoch;
        if (!series) continue;
        any = true;
        detail::append_stats_rows(out, "seed:" + std::to_string(rec.seed),
                                  to_string(kind),
                                  summarize_series(*series, cfg.duration_s));
      }
      if (any) {
        detail::append_stats_rows(out, "pooled", to_string(kind),
                                  pooled_summary(result, kind, cfg.duration_s));
      }
    }
  }

  // Figure data from the first run.
  const RunRecord& first = result.records.front();
  const RunSeries& lead = first.stoch ? *first.stoch : *first.det;

  detail::FigureTable ang{{"t", "wx", "wy", "wz", "wmx", "wmy", "wmz"}, {}};
  detail::FigureTable vel{{"t", "vx", "vy", "vz", "vmx", "vmy", "vmz"}, {}};
  ang.columns.assign(7, {});
  vel.columns.assign(7, {});
  detail::FigureTable body;
  body.names.push_back("t");
  for (std::size_t l = 0; l < first.frames.front().landmark_true.size(); ++l) {
    for (std::string sfx : {"_true_", "_meas_"}) {
      for (char a : {'x', 'y', 'z'}) {
        body.names.push_back("l" + std::to_string(l + 1) + sfx + a);
      }
    }
  }
  for (std::size_t d = 0; d < first.frames.front().direction_true.size(); ++d) {
    for (std::string sfx : {"_true_", "_meas_"}) {
      for (char a : {'x', 'y', 'z'}) {
        body.names.push_back("r" + std::to_string(d + 1) + sfx + a);
      }
    }
  }
  body.columns.assign(body.names.size(), {});
  for (const FrameLog& f : first.frames) {
    ang.columns[0].push_back(f.t);
    vel.columns[0].push_back(f.t);
    for (int i = 0; i < 3; ++i) {
      ang.columns[1 + i].push_back(f.twist_true.omega(i));
      ang.columns[4 + i].push_back(f.twist_meas.omega(i));
      vel.columns[1 + i].push_back(f.twist_true.v(i));
      vel.columns[4 + i].push_back(f.twist_meas.v(i));
    }
    std::size_t c = 0;
    body.columns[c++].push_back(f.t);
    for (std::size_t l = 0; l < f.landmark_true.size(); ++l) {
      for (int i = 0; i < 3; ++i) body.columns[c++].push_back(f.landmark_true[l](i));
      for (int i = 0; i < 3; ++i) body.columns[c++].push_back(f.landmark_meas[l](i));
    }
    for (std::size_t d = 0; d < f.direction_true.size(); ++d) {
      for (int i = 0; i < 3; ++i) body.columns[c++].push_back(f.direction_true[d](i));
      for (int i = 0; i < 3; ++i) body.columns[c++].push_back(f.direction_meas[d](i));
    }
  }

  detail::FigureTable euler{
      {"t", "roll", "pitch", "yaw", "rollh", "pitchh", "yawh"}, {}};
  detail::FigureTable traj{{"t", "x", "y", "z", "xh", "yh", "zh"}, {}};
  euler.columns.assign(7, {});
  traj.columns.assign(7, {});
  for (const StepRow& r : lead.rows) {
    euler.columns[0].push_back(r.t);
    traj.columns[0].push_back(r.t);
    for (int i = 0; i < 3; ++i) {
      euler.columns[1 + i].push_back(r.euler_true(i));
      euler.columns[4 + i].push_back(r.euler_hat(i));
      traj.columns[1 + i].push_back(r.p_true(i));
      traj.columns[4 + i].push_back(r.p_hat(i));
    }
  }

  detail::FigureTable err;
  err.names.push_back("t");
  if (first.stoch) {
    err.names.push_back("attdist_stoch");
    err.names.push_back("poserr_stoch");
  }
  if (first.det) {
    err.names.push_back("attdist_det");
    err.names.push_back("poserr_det");
  }
  err.columns.assign(err.names.size(), {});
  for (std::size_t i = 0; i < lead.rows.size(); ++i) {
    std::size_t c = 0;
    err.columns[c++].push_back(lead.rows[i].t);
    if (first.stoch) {
      err.columns[c++].push_back(first.stoch->rows[i].attitude_distance);
      err.columns[c++].push_back(first.stoch->rows[i].position_error.norm());
    }
    if (first.det) {
      err.columns[c++].push_back(first.det->rows[i].attitude_distance);
      err.columns[c++].push_back(first.det->rows[i].position_error.norm());
    }
  }

  detail::write_figure(outdir, "fig_angular_velocity", ang, plots);
  detail::write_figure(outdir, "fig_translational_velocity", vel, plots);
  detail::write_figure(outdir, "fig_body_vectors", body, plots);
  detail::write_figure(outdir, "fig_euler_angles", euler, plots);
  detail::write_figure(outdir, "fig_trajectory_3d", traj, plots);
  detail::write_figure(outdir, "fig_error_distances", err, plots);
}

/// Reloads stored run CSVs and recomputes the output statistics section of
/// summary.csv. Input-error statistics are not recoverable from the series
/// files, so the rewritten summary carries output rows only.
inline void recompute_summary(const std::filesystem::path& outdir) {
  namespace fs = std::filesystem;
  struct Loaded {
    std::uint64_t seed;
    FilterChoice kind;
    RunSeries series;
    double duration;
  };
  std::vector<Loaded> runs;
  if (!fs::is_directory(outdir)) {
    throw IoError("not a directory: " + outdir.string());
  }
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(outdir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("run_s", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    std::string name = path.filename().string();
    std::string core = name.substr(5, name.size() - 9);  // seed_kind
    auto sep = core.find('_');
    if (sep == std::string::npos) continue;
    Loaded run;
    try {
      run.seed = std::stoull(core.substr(0, sep));
    } catch (...) {
      continue;
    }
    std::string kind = core.substr(sep + 1);
    if (kind == "det") run.kind = FilterChoice::kDeterministic;
    else if (kind == "stoch") run.kind = FilterChoice::kStochastic;
    else continue;

    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != detail::kSeriesHeader) {
      throw IoError(path.string() + ": unexpected header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string cell;
      std::vector<double> vals;
      while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
      if (vals.size() != 29) throw IoError(path.string() + ": bad row");
      StepRow r;
      r.t = vals[0];
      r.p_true = {vals[1], vals[2], vals[3]};
      r.p_hat = {vals[4], vals[5], vals[6]};
      r.euler_true = {vals[7], vals[8], vals[9]};
      r.euler_hat = {vals[10], vals[11], vals[12]};
      r.attitude_distance = vals[13];
      r.position_error = {vals[14], vals[15], vals[16]};
      for (int i = 0; i < 6; ++i) r.bias_hat(i) = vals[17 + i];
      for (int i = 0; i < 6; ++i) r.sigma_hat(i) = vals[23 + i];
      run.series.rows.push_back(r);
      // Group error from the stored euler angles and positions.
      Mat3 r_true = rotation_from_euler_zyx(r.euler_true(0), r.euler_true(1),
                                            r.euler_true(2));
      Mat3 r_hat = rotation_from_euler_zyx(r.euler_hat(0), r.euler_hat(1),
                                           r.euler_hat(2));
      run.series.position_error_group.push_back(
          r.p_true - r_true * r_hat.transpose() * r.p_hat);
    }
    if (run.series.rows.empty()) throw IoError(path.string() + ": no rows");
    run.duration = run.series.rows.back().t;
    runs.push_back(std::move(run));
  }
  if (runs.empty()) {
    throw IoError("no run_s*_{det,stoch}.csv files in " + outdir.string());
  }

  std::ofstream out(outdir / "summary.csv");
  if (!out) throw IoError("cannot write " + (outdir / "summary.csv").string());
  out << "scope,filter,quantity,axis,mean,std\n";
  for (FilterChoice kind :
       {FilterChoice::kDeterministic, FilterChoice::kStochastic}) {
    detail::Welford1 att;
    detail::Welford3 pos, pos_group;
    bool any = false;
    for (const Loaded& run : runs) {
      if (run.kind != kind) continue;
      any = true;
      detail::append_stats_rows(out, "seed:" + std::to_string(run.seed),
                                to_string(kind),
                                summarize_series(run.series, run.duration));
      double t0 = summary_window_start(run.duration);
      for (std::size_t i = 0; i < run.series.rows.size(); ++i) {
        if (run.series.rows[i].t < t0 - 1e-9) continue;
        att.add(run.series.rows[i].attitude_distance);
        pos.add(run.series.rows[i].position_error);
        pos_group.add(run.series.position_error_group[i]);
      }
    }
    if (any) {
      SummaryStats pooled;
      pooled.samples = att.count();
      pooled.att_mean = att.mean();
      pooled.att_std = att.stddev();
      pooled.position_error = pos.stats();
      pooled.position_error_group = pos_group.stats();
      detail::append_stats_rows(out, "pooled", to_string(kind), pooled);
    }
  }
}

}  // namespace se3filter
