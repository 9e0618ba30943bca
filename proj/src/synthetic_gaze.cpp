#include "wayfarer/synthetic_gaze.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wayfarer::gaze {
namespace {

Vec3 direction(double yaw_deg, double pitch_deg) {
  const double y = deg2rad(yaw_deg);
  const double p = deg2rad(pitch_deg);
  return {std::cos(p) * std::sin(y), std::sin(p), std::cos(p) * std::cos(y)};
}

}  // namespace

SyntheticProfile profile_for(const std::string& label) {
  SyntheticProfile p;
  if (label == "steering") {
    p.fixation_ms_mean = 235.0;
    p.saccade_ms_mean = 46.0;
    p.saccade_amp_mean = 10.0;
    p.blink_rate_hz = 0.30;
    p.head_motion_dps = 3.5;
    p.pupil_drift_mm_per_min = 0.10;
  } else if (label == "teleport") {
    p.fixation_ms_mean = 300.0;
    p.saccade_ms_mean = 40.0;
    p.saccade_amp_mean = 7.0;
    p.blink_rate_hz = 0.22;
    p.head_motion_dps = 1.5;
    p.pupil_drift_mm_per_min = -0.05;
  } else {
    p.fixation_ms_mean = 285.0;
    p.saccade_ms_mean = 36.0;
    p.saccade_amp_mean = 8.0;
    p.blink_rate_hz = 0.26;
    p.head_motion_dps = 2.0;
    p.pupil_drift_mm_per_min = 0.20;
  }
  return p;
}

std::vector<GazeSample> synthesize_recording(const SyntheticProfile& profile, double duration_s, std::uint64_t seed,
                                             double rate_hz) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const double dt = 1.0 / rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  std::vector<GazeSample> out;
  out.reserve(n);

  double gaze_yaw = 0.0, gaze_pitch = 0.0, head_yaw = 0.0, head_pitch = 0.0;
  double pupil_noise = 0.0;

  enum class Phase { Fixation, Saccade, Blink } phase = Phase::Fixation;
  std::size_t remaining = 0;
  double sac_step_yaw = 0.0, sac_step_pitch = 0.0;
  double drift_yaw = 0.0, drift_pitch = 0.0, head_step = 0.0;
  std::size_t blink_len = 0, blink_pos = 0;

  auto start_fixation = [&] {
    phase = Phase::Fixation;
    const double ms = std::clamp(profile.fixation_ms_mean + profile.fixation_ms_sd * unit(rng), 90.0, 480.0);
    remaining = static_cast<std::size_t>(ms / 1000.0 * rate_hz);
    const double drift_dps = 1.0 + 6.0 * uni(rng);
    const double a = 2.0 * std::numbers::pi * uni(rng);
    drift_yaw = drift_dps * dt * std::cos(a);
    drift_pitch = drift_dps * dt * std::sin(a);
    head_step = std::abs(profile.head_motion_dps * (0.5 + 0.5 * unit(rng))) * dt * (uni(rng) < 0.5 ? -1 : 1);
  };
  auto start_saccade = [&] {
    phase = Phase::Saccade;
    const double ms = std::clamp(profile.saccade_ms_mean + 8.0 * unit(rng), 25.0, 65.0);
    remaining = std::max<std::size_t>(2, static_cast<std::size_t>(ms / 1000.0 * rate_hz));
    const double amp = std::clamp(profile.saccade_amp_mean + 3.0 * unit(rng), 3.0, 25.0);
    // Pull back toward straight ahead so the gaze stays within the field of view.
    const double a = std::atan2(-gaze_pitch, -gaze_yaw) + 1.2 * unit(rng);
    sac_step_yaw = amp * std::cos(a) / static_cast<double>(remaining);
    sac_step_pitch = amp * std::sin(a) / static_cast<double>(remaining);
  };
  auto start_blink = [&] {
    phase = Phase::Blink;
    blink_len = 4 + 12 + 6 + static_cast<std::size_t>(uni(rng) * 10);  // ramp, closed, reopen
    blink_pos = 0;
  };

  start_fixation();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    GazeSample s;
    s.t = t;
    s.openness = 1.0;

    switch (phase) {
      case Phase::Fixation:
        gaze_yaw += drift_yaw;
        gaze_pitch += drift_pitch;
        head_yaw += head_step;
        break;
      case Phase::Saccade:
        gaze_yaw += sac_step_yaw;
        gaze_pitch += sac_step_pitch;
        break;
      case Phase::Blink: {
        const std::size_t closed_from = 4, closed_to = blink_len - 6;
        if (blink_pos < closed_from) {
          s.openness = 1.0 - 0.24 * static_cast<double>(blink_pos + 1);
        } else if (blink_pos < closed_to) {
          s.openness = 0.0;
          s.valid = false;
        } else {
          s.openness = 0.2 + 0.8 * static_cast<double>(blink_pos - closed_to + 1) / 6.0;
        }
        break;
      }
    }

    s.gaze_dir = direction(gaze_yaw, gaze_pitch);
    s.head_dir = direction(head_yaw, head_pitch);
    pupil_noise = 0.98 * pupil_noise + 0.01 * unit(rng);
    s.pupil_mm = profile.pupil_mm + profile.pupil_drift_mm_per_min * t / 60.0 +
                 0.08 * std::sin(2.0 * std::numbers::pi * 0.1 * t) + pupil_noise + 0.01 * unit(rng);
    out.push_back(s);

    if (phase == Phase::Blink) {
      if (++blink_pos >= blink_len) start_fixation();
    } else if (remaining == 0 || --remaining == 0) {
      if (phase == Phase::Fixation) {
        if (uni(rng) < profile.blink_rate_hz * profile.fixation_ms_mean / 1000.0) start_blink();
        else start_saccade();
      } else {
        start_fixation();
      }
    }
  }
  return out;
}

}  // namespace wayfarer::gaze
