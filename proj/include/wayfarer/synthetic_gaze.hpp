#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wayfarer/gaze.hpp"

namespace wayfarer::gaze {

// Behavioural knobs of a simulated viewer.
struct SyntheticProfile {
  double fixation_ms_mean = 280.0;
  double fixation_ms_sd = 60.0;
  double saccade_ms_mean = 40.0;
  double saccade_amp_mean = 8.0;     // degrees
  double blink_rate_hz = 0.25;
  double head_motion_dps = 2.0;      // typical head speed during fixations
  double pupil_mm = 3.5;
  double pupil_drift_mm_per_min = 0.0;
};

// Default profile per technique label ("teleport", "steering", "llm").
SyntheticProfile profile_for(const std::string& label);

// A 200 Hz (by default) recording alternating fixations, saccades and blinks.
std::vector<GazeSample> synthesize_recording(const SyntheticProfile& profile, double duration_s, std::uint64_t seed,
                                             double rate_hz = 200.0);

}  // namespace wayfarer::gaze
