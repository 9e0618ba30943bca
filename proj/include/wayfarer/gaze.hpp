#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wayfarer/geometry.hpp"

namespace wayfarer::gaze {

// One cyclopean eye-tracker sample.
struct GazeSample {
  double t = 0.0;           // seconds, strictly increasing
  Vec3 gaze_dir{0, 0, 1};   // unit vector
  Vec3 head_dir{0, 0, 1};   // unit vector
  double pupil_mm = 0.0;
  double openness = 1.0;    // 0 closed, 1 open
  bool valid = true;
};

// Velocity and duration criteria for I-VT classification. Durations are
// exclusive bounds in milliseconds, velocities in degrees per second.
struct EventDetectionConfig {
  double fix_head_vmax = 7.0;
  double fix_gaze_vmax = 30.0;
  double fix_dur_min = 80.0;
  double fix_dur_max = 500.0;
  double sac_gaze_vmin = 40.0;
  double sac_dur_min = 20.0;
  double sac_dur_max = 70.0;

  void validate() const;
};

// Per-sample angular speeds. Entries are empty where a sample or its
// predecessor is invalid.
struct Velocities {
  std::vector<std::optional<double>> gaze;
  std::vector<std::optional<double>> head;
};

Velocities angular_velocities(std::span<const GazeSample> samples);

enum class SampleLabel { Unlabeled, Fixation, Saccade };

std::vector<SampleLabel> label_samples(const Velocities& v, const EventDetectionConfig& cfg = {});

enum class EventKind { Fixation, Saccade };

struct GazeEvent {
  EventKind kind = EventKind::Fixation;
  double t_start = 0.0;
  double t_end = 0.0;
  double duration_ms = 0.0;
  double amplitude_deg = 0.0;       // saccades only
  double peak_velocity_dps = 0.0;   // saccades only
  std::size_t first = 0;            // sample indices, inclusive
  std::size_t last = 0;
};

std::vector<GazeEvent> detect_events(std::span<const GazeSample> samples, const EventDetectionConfig& cfg = {});

struct BlinkConfig {
  double closed_threshold = 0.05;
  std::size_t min_closed_samples = 2;
  std::size_t min_ramp_samples = 3;
  double max_duration_ms = 500.0;
};

struct Blink {
  double t_start = 0.0;
  double t_end = 0.0;
  double duration_ms = 0.0;
};

std::vector<Blink> detect_blinks(std::span<const GazeSample> samples, const BlinkConfig& cfg = {});

struct PupilConfig {
  int window = 31;
  int order = 3;
  double max_gap_s = 0.075;
  double closed_threshold = 0.05;
};

// A pupil trace aligned with its samples; missing values are excluded from statistics.
struct PupilSeries {
  std::vector<double> t;
  std::vector<std::optional<double>> value;
};

PupilSeries smooth_pupil(std::span<const GazeSample> samples, const PupilConfig& cfg = {});

// Divides every value by the mean over [onset - baseline_s, onset].
PupilSeries baseline_correct(const PupilSeries& series, double onset, double baseline_s = 1.0);

std::vector<GazeSample> read_gaze_log(const std::filesystem::path& path);
std::vector<GazeSample> parse_gaze_log(std::string_view text);
std::string format_gaze_log(std::span<const GazeSample> samples);

// Checks strictly increasing time and unit directions on valid samples.
void validate_recording(std::span<const GazeSample> samples);

}  // namespace wayfarer::gaze
