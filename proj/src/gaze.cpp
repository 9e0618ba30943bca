#include "wayfarer/gaze.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "wayfarer/error.hpp"
#include "wayfarer/savgol.hpp"

namespace wayfarer::gaze {
namespace {

constexpr std::string_view kLogHeader = "t_s,gaze_x,gaze_y,gaze_z,head_x,head_y,head_z,pupil_mm,openness,valid";

bool pupil_usable(const GazeSample& s, double closed_threshold) {
  return s.valid && s.openness > closed_threshold && std::isfinite(s.pupil_mm) && s.pupil_mm > 0.0;
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(fmt::format("gaze log line {}: bad number '{}'", line, field));
  }
  return v;
}

}  // namespace

void EventDetectionConfig::validate() const {
  const double all[] = {fix_head_vmax, fix_gaze_vmax, fix_dur_min, fix_dur_max, sac_gaze_vmin, sac_dur_min, sac_dur_max};
  if (std::any_of(std::begin(all), std::end(all), [](double v) { return !(v > 0.0); })) {
    throw ValidationError("event detection: thresholds must be positive");
  }
  if (fix_dur_min >= fix_dur_max) throw ValidationError("event detection: fix_dur_min must be below fix_dur_max");
  if (sac_dur_min >= sac_dur_max) throw ValidationError("event detection: sac_dur_min must be below sac_dur_max");
  if (fix_gaze_vmax > sac_gaze_vmin) throw ValidationError("event detection: fix_gaze_vmax exceeds sac_gaze_vmin");
}

void validate_recording(std::span<const GazeSample> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GazeSample& s = samples[i];
    if (!std::isfinite(s.t)) throw ValidationError(fmt::format("sample {}: non-finite time", i));
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      throw ValidationError(fmt::format("sample {}: time {} does not increase", i, s.t));
    }
    if (!s.valid) continue;
    if (std::abs(norm(s.gaze_dir) - 1.0) > 1e-6) throw ValidationError(fmt::format("sample {}: gaze_dir not unit", i));
    if (std::abs(norm(s.head_dir) - 1.0) > 1e-6) throw ValidationError(fmt::format("sample {}: head_dir not unit", i));
  }
}

Velocities angular_velocities(std::span<const GazeSample> samples) {
  if (samples.size() < 2) throw TooFewSamples("angular velocity needs at least two samples");
  validate_recording(samples);
  Velocities v;
  v.gaze.resize(samples.size());
  v.head.resize(samples.size());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const GazeSample& a = samples[i - 1];
    const GazeSample& b = samples[i];
    if (!a.valid || !b.valid) continue;
    const double dt = b.t - a.t;
    v.gaze[i] = angle_between_deg(a.gaze_dir, b.gaze_dir) / dt;
    v.head[i] = angle_between_deg(a.head_dir, b.head_dir) / dt;
  }
  if (samples[0].valid) {
    v.gaze[0] = v.gaze[1];
    v.head[0] = v.head[1];
  }
  return v;
}

std::vector<SampleLabel> label_samples(const Velocities& v, const EventDetectionConfig& cfg) {
  std::vector<SampleLabel> labels(v.gaze.size(), SampleLabel::Unlabeled);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!v.gaze[i] || !v.head[i]) continue;
    const double g = *v.gaze[i];
    const double h = *v.head[i];
    if (g < cfg.fix_gaze_vmax && h < cfg.fix_head_vmax) labels[i] = SampleLabel::Fixation;
    else if (g > cfg.sac_gaze_vmin) labels[i] = SampleLabel::Saccade;
  }
  return labels;
}

std::vector<GazeEvent> detect_events(std::span<const GazeSample> samples, const EventDetectionConfig& cfg) {
  cfg.validate();
  const Velocities v = angular_velocities(samples);
  const std::vector<SampleLabel> labels = label_samples(v, cfg);

  std::vector<GazeEvent> events;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == SampleLabel::Unlabeled) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1] == labels[i]) ++j;

    GazeEvent e;
    e.kind = labels[i] == SampleLabel::Fixation ? EventKind::Fixation : EventKind::Saccade;
    e.first = i;
    e.last = j;
    e.t_start = samples[i].t;
    e.t_end = samples[j].t;
    e.duration_ms = (e.t_end - e.t_start) * 1000.0;
    const bool fixation = e.kind == EventKind::Fixation;
    const double lo = fixation ? cfg.fix_dur_min : cfg.sac_dur_min;
    const double hi = fixation ? cfg.fix_dur_max : cfg.sac_dur_max;
    if (e.duration_ms > lo && e.duration_ms < hi) {
      if (!fixation) {
        e.amplitude_deg = angle_between_deg(samples[i].gaze_dir, samples[j].gaze_dir);
        for (std::size_t k = i; k <= j; ++k) e.peak_velocity_dps = std::max(e.peak_velocity_dps, *v.gaze[k]);
      }
      events.push_back(e);
    }
    i = j + 1;
  }
  return events;
}

std::vector<Blink> detect_blinks(std::span<const GazeSample> samples, const BlinkConfig& cfg) {
  std::vector<Blink> blinks;
  std::size_t i = 0;
  while (i < samples.size()) {
    if (samples[i].openness > cfg.closed_threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < samples.size() && samples[j + 1].openness <= cfg.closed_threshold) ++j;

    // Length of the strictly decreasing openness run that ends just before closure.
    std::size_t ramp = 0;
    if (i > 0) {
      ramp = 1;
      for (std::size_t k = i - 1; k > 0 && samples[k].openness < samples[k - 1].openness; --k) ++ramp;
    }
    const double duration_ms = (samples[j].t - samples[i].t) * 1000.0;
    if (j - i + 1 >= cfg.min_closed_samples && ramp >= cfg.min_ramp_samples && duration_ms > 0.0 &&
        duration_ms <= cfg.max_duration_ms) {
      blinks.push_back({samples[i].t, samples[j].t, duration_ms});
    }
    i = j + 1;
  }
  return blinks;
}

PupilSeries smooth_pupil(std::span<const GazeSample> samples, const PupilConfig& cfg) {
  if (cfg.window % 2 == 0 || cfg.order >= cfg.window) throw ValidationError("pupil: window must be odd and exceed order");
  PupilSeries out;
  out.t.reserve(samples.size());
  out.value.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.t.push_back(samples[i].t);
    if (pupil_usable(samples[i], cfg.closed_threshold)) out.value[i] = samples[i].pupil_mm;
  }

  // Short gaps, measured between the valid samples that bound them, are bridged linearly.
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!out.value[i]) continue;
    if (prev && i > *prev + 1 && out.t[i] - out.t[*prev] <= cfg.max_gap_s + 1e-9) {
      const double v0 = *out.value[*prev];
      const double v1 = *out.value[i];
      for (std::size_t k = *prev + 1; k < i; ++k) {
        const double f = (out.t[k] - out.t[*prev]) / (out.t[i] - out.t[*prev]);
        out.value[k] = v0 + f * (v1 - v0);
      }
    }
    prev = i;
  }

  bool any_full_window = false;
  std::size_t i = 0;
  while (i < samples.size()) {
    if (!out.value[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < samples.size() && out.value[j + 1]) ++j;
    const auto len = static_cast<int>(j - i + 1);
    int window = std::min(cfg.window, len % 2 == 1 ? len : len - 1);
    if (window >= cfg.window) any_full_window = true;
    if (window > cfg.order) {
      std::vector<double> raw;
      raw.reserve(static_cast<std::size_t>(len));
      for (std::size_t k = i; k <= j; ++k) raw.push_back(*out.value[k]);
      const std::vector<double> smooth = savgol_filter(raw, window, cfg.order);
      for (std::size_t k = i; k <= j; ++k) out.value[k] = smooth[k - i];
    }
    i = j + 1;
  }
  if (!any_full_window) {
    throw TooFewSamples(fmt::format("pupil: no valid stretch of {} samples to smooth", cfg.window));
  }
  return out;
}

PupilSeries baseline_correct(const PupilSeries& series, double onset, double baseline_s) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    if (series.value[i] && series.t[i] >= onset - baseline_s - 1e-9 && series.t[i] <= onset + 1e-9) {
      sum += *series.value[i];
      ++count;
    }
  }
  if (count == 0) throw DegenerateBaseline("pupil baseline window holds no valid samples");
  const double mean = sum / static_cast<double>(count);
  if (!(mean > 0.0)) throw DegenerateBaseline("pupil baseline mean is not positive");

  PupilSeries out = series;
  for (auto& v : out.value) {
    if (v) *v /= mean;
  }
  return out;
}

std::vector<GazeSample> parse_gaze_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<GazeSample> samples;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kLogHeader) throw ParseError(fmt::format("gaze log: expected header '{}'", kLogHeader));
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 10) throw ParseError(fmt::format("gaze log line {}: expected 10 fields", line_no));
    GazeSample s;
    s.t = parse_double(fields[0], line_no);
    s.gaze_dir = {parse_double(fields[1], line_no), parse_double(fields[2], line_no), parse_double(fields[3], line_no)};
    s.head_dir = {parse_double(fields[4], line_no), parse_double(fields[5], line_no), parse_double(fields[6], line_no)};
    s.pupil_mm = parse_double(fields[7], line_no);
    s.openness = parse_double(fields[8], line_no);
    const std::string_view valid = fields[9];
    if (valid == "1" || valid == "true") s.valid = true;
    else if (valid == "0" || valid == "false") s.valid = false;
    else throw ParseError(fmt::format("gaze log line {}: bad valid flag '{}'", line_no, valid));
    samples.push_back(s);
  }
  if (!header_seen) throw ParseError("gaze log: empty file");
  validate_recording(samples);
  return samples;
}

std::vector<GazeSample> read_gaze_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gaze log " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_gaze_log(buf.str());
}

std::string format_gaze_log(std::span<const GazeSample> samples) {
  std::string out(kLogHeader);
  out += '\n';
  for (const GazeSample& s : samples) {
    out += fmt::format("{:.6f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.6f},{:.6f},{}\n", s.t, s.gaze_dir.x,
                       s.gaze_dir.y, s.gaze_dir.z, s.head_dir.x, s.head_dir.y, s.head_dir.z, s.pupil_mm, s.openness,
                       s.valid ? 1 : 0);
  }
  return out;
}

}  // namespace wayfarer::gaze
