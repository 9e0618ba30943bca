#include "wayfarer/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "wayfarer/error.hpp"

namespace wayfarer::gaze {
namespace {

struct Summary {
  double count = 0, mean = 0, std = 0, min = 0, max = 0, sum = 0;
};

// Population statistics; all zero for an empty set.
Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.count = static_cast<double>(xs.size());
  s.sum = std::accumulate(xs.begin(), xs.end(), 0.0);
  s.mean = s.sum / s.count;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / s.count);
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

bool in_window(double t, const Window& w) { return t >= w.t_begin && t < w.t_end; }

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "fixation_count",
      "fixation_duration_mean", "fixation_duration_std", "fixation_duration_min", "fixation_duration_max",
      "fixation_duration_sum",
      "saccade_count",
      "saccade_duration_mean", "saccade_duration_std", "saccade_duration_min", "saccade_duration_max",
      "saccade_duration_sum",
      "saccade_peak_velocity_mean", "saccade_peak_velocity_std", "saccade_peak_velocity_min",
      "saccade_peak_velocity_max",
      "saccade_amplitude_mean", "saccade_amplitude_std", "saccade_amplitude_min", "saccade_amplitude_max",
      "sac_fix_duration_ratio",
      "sac_fix_count_ratio",
      "blink_count",
      "blink_duration_mean", "blink_duration_std", "blink_duration_min", "blink_duration_max",
      "pupil_mean", "pupil_std", "pupil_min", "pupil_max",
  };
  return names;
}

std::vector<Window> window_stream(std::span<const GazeSample> samples, double window_s) {
  if (!(window_s > 0.0)) throw ValidationError("window length must be positive");
  if (samples.size() < 2) return {};
  std::vector<double> dts;
  dts.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) dts.push_back(samples[i].t - samples[i - 1].t);
  std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
  const double period = dts[dts.size() / 2];

  const double start = samples.front().t;
  const double duration = samples.back().t - start + period;
  const auto n = static_cast<std::size_t>(std::floor(duration / window_s + 1e-9));
  std::vector<Window> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back({start + static_cast<double>(k) * window_s, start + static_cast<double>(k + 1) * window_s});
  }
  return out;
}

FeatureVector extract_features(std::span<const GazeEvent> events, std::span<const Blink> blinks,
                               const PupilSeries& pupil_norm, const Window& window, std::string label) {
  std::vector<double> fix_dur, sac_dur, sac_peak, sac_amp, blink_dur, pupil;
  for (const GazeEvent& e : events) {
    if (!in_window(e.t_start, window)) continue;
    if (e.kind == EventKind::Fixation) {
      fix_dur.push_back(e.duration_ms);
    } else {
      sac_dur.push_back(e.duration_ms);
      sac_peak.push_back(e.peak_velocity_dps);
      sac_amp.push_back(e.amplitude_deg);
    }
  }
  for (const Blink& b : blinks) {
    if (in_window(b.t_start, window)) blink_dur.push_back(b.duration_ms);
  }
  for (std::size_t i = 0; i < pupil_norm.t.size(); ++i) {
    if (pupil_norm.value[i] && in_window(pupil_norm.t[i], window)) pupil.push_back(*pupil_norm.value[i]);
  }

  const Summary f = summarize(fix_dur);
  const Summary s = summarize(sac_dur);
  const Summary pv = summarize(sac_peak);
  const Summary am = summarize(sac_amp);
  const Summary b = summarize(blink_dur);
  const Summary p = summarize(pupil);

  FeatureVector out;
  out.label = std::move(label);
  out.t_begin = window.t_begin;
  out.t_end = window.t_end;
  out.values = {f.count,  f.mean,  f.std,  f.min,  f.max,  f.sum,
                s.count,  s.mean,  s.std,  s.min,  s.max,  s.sum,
                pv.mean,  pv.std,  pv.min, pv.max,
                am.mean,  am.std,  am.min, am.max,
                ratio(s.sum, f.sum), ratio(s.count, f.count),
                b.count,  b.mean,  b.std,  b.min,  b.max,
                p.mean,   p.std,   p.min,  p.max};
  return out;
}

std::vector<FeatureVector> process_recording(std::span<const GazeSample> samples, const std::string& label,
                                             const PipelineConfig& cfg) {
  const std::vector<GazeEvent> events = detect_events(samples, cfg.events);
  const std::vector<Blink> blinks = detect_blinks(samples, cfg.blinks);
  const PupilSeries smooth = smooth_pupil(samples, cfg.pupil);
  const PupilSeries norm = baseline_correct(smooth, samples.front().t + cfg.onset_offset_s, cfg.baseline_s);

  std::vector<FeatureVector> rows;
  for (const Window& w : window_stream(samples, cfg.window_s)) {
    rows.push_back(extract_features(events, blinks, norm, w, label));
  }
  return rows;
}

std::string format_feature_matrix(std::span<const FeatureVector> rows) {
  std::string out;
  for (std::string_view name : feature_names()) {
    out += name;
    out += ',';
  }
  out += "label\n";
  for (const FeatureVector& r : rows) {
    for (double v : r.values) out += fmt::format("{},", v);
    out += r.label;
    out += '\n';
  }
  return out;
}

void write_feature_matrix(const std::filesystem::path& path, std::span<const FeatureVector> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write feature matrix " + path.string());
  out << format_feature_matrix(rows);
}

}  // namespace wayfarer::gaze
