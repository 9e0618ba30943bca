#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/gaze.hpp"
#include "wayfarer/savgol.hpp"
#include "wayfarer/synthetic_gaze.hpp"

using namespace wayfarer;
using namespace wayfarer::gaze;

namespace {

Vec3 yaw_dir(double deg) { return {std::sin(deg2rad(deg)), 0, std::cos(deg2rad(deg))}; }

// n samples at 200 Hz rotating the gaze at `vg` and the head at `vh` deg/s.
std::vector<GazeSample> sweep(std::size_t n, double vg, double vh, double t0 = 0.0) {
  std::vector<GazeSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    GazeSample s;
    s.t = t0 + static_cast<double>(i) * 0.005;
    s.gaze_dir = yaw_dir(vg * static_cast<double>(i) * 0.005);
    s.head_dir = yaw_dir(vh * static_cast<double>(i) * 0.005);
    s.pupil_mm = 4.0;
    out.push_back(s);
  }
  return out;
}

std::vector<GazeSample> with_openness(const std::vector<double>& open) {
  auto s = sweep(open.size(), 0, 0);
  for (std::size_t i = 0; i < open.size(); ++i) {
    s[i].openness = open[i];
    s[i].valid = open[i] > 0.05;
  }
  return s;
}

}  // namespace

TEST_SUITE("gaze") {
  TEST_CASE("angular velocities") {
    const auto still = angular_velocities(sweep(10, 0, 0));
    for (auto v : still.gaze) CHECK(*v == doctest::Approx(0.0));
    const auto moving = angular_velocities(sweep(10, 200, 0));
    for (auto v : moving.gaze) CHECK(*v == doctest::Approx(200.0));
    CHECK_THROWS_AS(angular_velocities(sweep(1, 0, 0)), TooFewSamples);
    auto dup = sweep(5, 0, 0);
    dup[3].t = dup[2].t;
    CHECK_THROWS_AS(angular_velocities(dup), ValidationError);
  }

  TEST_CASE("invalid samples have no velocity") {
    auto s = sweep(6, 10, 0);
    s[3].valid = false;
    const auto v = angular_velocities(s);
    CHECK_FALSE(v.gaze[3]);
    CHECK_FALSE(v.gaze[4]);
    CHECK(v.gaze[5]);
  }

  TEST_CASE("event examples") {
    auto fix = detect_events(sweep(30, 10, 2));
    REQUIRE(fix.size() == 1);
    CHECK(fix[0].kind == EventKind::Fixation);
    CHECK(fix[0].duration_ms == doctest::Approx(145.0));

    auto sac = detect_events(sweep(8, 60, 0));
    REQUIRE(sac.size() == 1);
    CHECK(sac[0].kind == EventKind::Saccade);
    CHECK(sac[0].duration_ms == doctest::Approx(35.0));
    CHECK(sac[0].amplitude_deg == doctest::Approx(60 * 0.035));
    CHECK(sac[0].peak_velocity_dps == doctest::Approx(60.0));

    CHECK(detect_events(sweep(3, 60, 0)).empty());
  }

  TEST_CASE("head motion vetoes fixations and the 30-40 band stays unlabeled") {
    CHECK(detect_events(sweep(30, 10, 9)).empty());
    CHECK(detect_events(sweep(30, 35, 0)).empty());
  }

  TEST_CASE("duration bands are exclusive") {
    // 17 samples = 80 ms exactly: not a fixation. 18 samples = 85 ms: is.
    CHECK(detect_events(sweep(17, 10, 0)).empty());
    CHECK(detect_events(sweep(18, 10, 0)).size() == 1);
    // 101 samples = 500 ms: too long.
    CHECK(detect_events(sweep(101, 10, 0)).empty());
  }

  TEST_CASE("invalid samples split runs") {
    auto s = sweep(60, 10, 0);
    s[30].valid = false;
    const auto ev = detect_events(s);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].last < 30);
    CHECK(ev[1].first > 30);
  }

  TEST_CASE("detector matches the labeling oracle on random traces") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto trace = oracle::ivt_trace(seed);
      const auto got = detect_events(trace);
      const auto want = oracle::ivt_events(trace);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == want[i].first);
        CHECK(got[i].last == want[i].last);
        CHECK(static_cast<int>(got[i].kind) + 1 == want[i].kind);
      }
    }
  }

  TEST_CASE("config validation") {
    EventDetectionConfig cfg;
    cfg.fix_gaze_vmax = 50;  // overlaps the saccade threshold
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }

  TEST_CASE("blinks") {
    const auto b = detect_blinks(with_openness({1, .8, .5, .2, 0, 0, 0, .4, 1}));
    REQUIRE(b.size() == 1);
    CHECK(b[0].duration_ms == doctest::Approx(10.0));
    CHECK(detect_blinks(with_openness({1, 1, 1, 0, 0, 0, 1})).empty());
    CHECK(detect_blinks(with_openness({1, .5, .3, .2, .1, .2})).empty());
    // one closed sample is not enough
    CHECK(detect_blinks(with_openness({1, .8, .5, .2, 0, .4, 1})).empty());
    // a ramp that is not strictly decreasing
    CHECK(detect_blinks(with_openness({1, .5, .5, .2, 0, 0, 1})).empty());
  }

  TEST_CASE("blinks longer than 500 ms are tracking loss") {
    std::vector<double> open = {1, .8, .5, .2};
    open.insert(open.end(), 102, 0.0);  // 101 intervals = 505 ms
    open.push_back(1);
    CHECK(detect_blinks(with_openness(open)).empty());
  }

  TEST_CASE("savgol reproduces cubics and constants") {
    std::vector<double> cubic, flat(100, 4.0);
    for (int i = 0; i < 100; ++i) {
      const double x = i * 0.01;
      cubic.push_back(2 - 3 * x + 0.5 * x * x + 4 * x * x * x);
    }
    const auto sc = savgol_filter(cubic, 31, 3);
    const auto sf = savgol_filter(flat, 31, 3);
    for (int i = 0; i < 100; ++i) {
      CHECK(std::abs(sc[i] - cubic[i]) < 1e-6);
      CHECK(std::abs(sf[i] - 4.0) < 1e-9);
    }
  }

  TEST_CASE("savgol weights match the textbook 5-point quadratic") {
    // Classic coefficients (-3, 12, 17, 12, -3) / 35.
    const auto w = savgol_weights(5, 2, 0);
    const double want[] = {-3 / 35.0, 12 / 35.0, 17 / 35.0, 12 / 35.0, -3 / 35.0};
    for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }

  TEST_CASE("a spike is smoothed to within its neighbourhood") {
    std::vector<GazeSample> s = sweep(200, 0, 0);
    s[100].pupil_mm = 6.0;
    const PupilSeries out = smooth_pupil(s);
    CHECK(*out.value[100] > 4.0);
    CHECK(*out.value[100] < 6.0);
  }

  TEST_CASE("pupil gaps: short ones bridged, long ones left missing") {
    auto s = sweep(400, 0, 0);
    for (std::size_t i = 100; i < 110; ++i) s[i].valid = false;  // 55 ms between valid neighbours
    for (std::size_t i = 200; i < 230; ++i) s[i].valid = false;  // 155 ms
    const PupilSeries out = smooth_pupil(s);
    for (std::size_t i = 100; i < 110; ++i) CHECK(out.value[i]);
    for (std::size_t i = 200; i < 230; ++i) CHECK_FALSE(out.value[i]);
    CHECK(*out.value[105] == doctest::Approx(4.0));
  }

  TEST_CASE("pupil needs one full window") {
    CHECK_THROWS_AS(smooth_pupil(sweep(20, 0, 0)), TooFewSamples);
  }

  TEST_CASE("divisive baseline") {
    PupilSeries p;
    for (int i = 0; i < 400; ++i) {
      p.t.push_back(i * 0.005);
      p.value.push_back(i <= 200 ? 4.0 : 4.4);  // the window [0, 1] is closed
    }
    const PupilSeries n = baseline_correct(p, 1.0);
    CHECK(*n.value[0] == doctest::Approx(1.0));
    CHECK(*n.value[300] == doctest::Approx(1.1));
    CHECK_THROWS_AS(baseline_correct(p, -5.0), DegenerateBaseline);
    PupilSeries zero = p;
    for (auto& v : zero.value) v = 0.0;
    CHECK_THROWS_AS(baseline_correct(zero, 1.0), DegenerateBaseline);
  }

  TEST_CASE("gaze log round trip and header check") {
    const auto rec = synthesize_recording(profile_for("llm"), 2.0, 3);
    const std::string text = format_gaze_log(rec);
    const auto back = parse_gaze_log(text);
    REQUIRE(back.size() == rec.size());
    CHECK(format_gaze_log(back) == text);
    CHECK_THROWS_AS(parse_gaze_log("t,x\n0,1\n"), ParseError);
  }
}
