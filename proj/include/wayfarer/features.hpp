#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wayfarer/gaze.hpp"

namespace wayfarer::gaze {

inline constexpr std::size_t kFeatureCount = 31;

// Column names in matrix order.
const std::array<std::string_view, kFeatureCount>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string label;
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct Window {
  double t_begin = 0.0;
  double t_end = 0.0;  // exclusive
};

// Consecutive non-overlapping windows from the first sample; a trailing
// partial window is dropped. The recording is taken to last from the first
// sample until one median sample period after the last.
std::vector<Window> window_stream(std::span<const GazeSample> samples, double window_s = 20.0);

// Events and blinks belong to the window containing their start time.
// Empty sets contribute zeros; ratios with a zero denominator are zero.
FeatureVector extract_features(std::span<const GazeEvent> events, std::span<const Blink> blinks,
                               const PupilSeries& pupil_norm, const Window& window, std::string label);

struct PipelineConfig {
  EventDetectionConfig events;
  BlinkConfig blinks;
  PupilConfig pupil;
  double window_s = 20.0;
  double baseline_s = 1.0;
  // Stimulus onset relative to the first sample; the baseline interval ends here.
  double onset_offset_s = 1.0;
};

std::vector<FeatureVector> process_recording(std::span<const GazeSample> samples, const std::string& label,
                                             const PipelineConfig& cfg = {});

std::string format_feature_matrix(std::span<const FeatureVector> rows);
void write_feature_matrix(const std::filesystem::path& path, std::span<const FeatureVector> rows);

}  // namespace wayfarer::gaze
