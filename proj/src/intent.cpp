#include "wayfarer/intent.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "wayfarer/error.hpp"

namespace wayfarer {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string triple(Vec3 v) {
  auto f = [](double x) {
    std::string s = fmt::format("{:.1f}", x);
    return s == "-0.0" ? std::string("0.0") : s;
  };
  return fmt::format("({}, {}, {})", f(v.x), f(v.y), f(v.z));
}

bool starts_number(std::string_view text, std::size_t i) {
  auto digit = [&](std::size_t k) { return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])); };
  if (digit(i)) return true;
  if (text[i] == '.') return digit(i + 1);
  if (text[i] == '-' || text[i] == '+') return digit(i + 1) || (i + 1 < text.size() && text[i + 1] == '.' && digit(i + 2));
  return false;
}

constexpr std::string_view kRefusal = "I cannot determine a target.";
constexpr std::string_view kAmbiguous = "Ambiguous target.";

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Scheduled: return "Scheduled";
    case Outcome::NoTarget: return "NoTarget";
    case Outcome::OutOfRange: return "OutOfRange";
    case Outcome::BackendError: return "BackendError";
  }
  return "Unknown";
}

std::string build_system_prompt() {
  return
      "You are a navigation assistant inside a virtual town. You turn a spoken movement request into a "
      "single destination on the ground.\n"
      "\n"
      "Each user message has four parts: the command as spoken, the user's current position and yaw "
      "(degrees, 0 faces +z/north and 90 faces +x/east), the maximum distance the user may travel, and "
      "a list of objects the user can currently see, each with its name, color, category and "
      "position.\n"
      "\n"
      "Rules:\n"
      "1. Reply with the destination only, written as (x, y, z) in meters with one decimal place. "
      "Do not add any other words.\n"
      "2. \"Forward\" means along the user's yaw, \"back\" the opposite way, \"left\" and \"right\" "
      "are 90 degrees to either side.\n"
      "3. When the user names an object, answer with that object's position.\n"
      "4. If the command is ambiguous, refers to nothing in the list, or is not a movement request, "
      "reply exactly: I cannot determine a target.\n"
      "\n"
      "Example 1:\n"
      "Command: \"move 50 meters forward\"\n"
      "Position: (100.0, 0.0, 100.0), yaw 0.0\n"
      "Answer: (100.0, 0.0, 150.0)\n"
      "\n"
      "Example 2:\n"
      "Command: \"go to the red house\"\n"
      "Visible: House (red building) at (30.0, 0.0, 60.0)\n"
      "Position: (0.0, 0.0, 40.0), yaw 0.0\n"
      "Answer: (30.0, 0.0, 60.0)\n"
      "\n"
      "Example 3:\n"
      "Command: \"take me somewhere nice\"\n"
      "Position: (0.0, 0.0, 0.0), yaw 0.0\n"
      "Answer: I cannot determine a target.\n";
}

std::string build_user_prompt(std::string_view transcript, std::string_view context, const Pose& pose,
                              double max_travel) {
  if (trim(transcript).empty()) throw EmptyTranscript();
  return fmt::format(
      "Command: \"{}\"\n"
      "Position: {}, yaw {:.1f}\n"
      "Maximum travel distance: {:.1f} meters\n"
      "Visible objects:\n"
      "{}",
      transcript, triple(pose.position), pose.yaw, max_travel, context);
}

std::optional<Vec3> parse_target(std::string_view text) {
  static const std::regex number(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  double found[3];
  int count = 0;
  std::size_t i = 0;
  while (i < text.size() && count < 3) {
    if (!starts_number(text, i)) {
      ++i;
      continue;
    }
    std::cmatch m;
    const char* begin = text.data() + i;
    if (!std::regex_search(begin, text.data() + text.size(), m, number, std::regex_constants::match_continuous)) {
      ++i;
      continue;
    }
    const char* first = begin;
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, begin + m.length(), value);
    if (ec == std::errc() && std::isfinite(value)) found[count++] = value;
    i += std::max<std::size_t>(1, m.length());
  }
  if (count < 3) return std::nullopt;
  return Vec3{found[0], found[1], found[2]};
}

std::string mock_resolve(std::string_view transcript, const Pose& pose, const std::vector<SceneObject>& visible) {
  const std::string text = lower(trim(transcript));

  static const std::regex move(R"(move\s+([0-9]+(?:\.[0-9]+)?)\s*(?:meters?|metres?|m)\s+(forward|back|backward|left|right)\b)");
  std::smatch m;
  if (std::regex_search(text, m, move)) {
    const double dist = std::stod(m[1].str());
    const std::string dir = m[2].str();
    double yaw = pose.yaw;
    if (dir == "back" || dir == "backward") yaw += 180.0;
    else if (dir == "left") yaw -= 90.0;
    else if (dir == "right") yaw += 90.0;
    return triple(pose.position + dist * heading_vector(yaw));
  }

  static const std::regex go_to(R"(go\s+to\s+(?:the\s+)?(.+))");
  if (std::regex_search(text, m, go_to)) {
    const std::vector<std::string> wanted = words(m[1].str());
    std::vector<const SceneObject*> matches;
    if (!wanted.empty()) {
      for (const SceneObject& o : visible) {
        std::set<std::string> vocab;
        for (auto& w : words(o.name)) vocab.insert(w);
        for (auto& w : words(o.color)) vocab.insert(w);
        if (std::all_of(wanted.begin(), wanted.end(), [&](const std::string& w) { return vocab.count(w) > 0; })) {
          matches.push_back(&o);
        }
      }
    }
    if (matches.size() == 1) return triple(matches.front()->position);
    if (matches.size() > 1) return std::string(kAmbiguous);
  }
  return std::string(kRefusal);
}

Resolution resolve_command(std::string_view transcript, const Pose& pose, const TownLayout& layout,
                           const ResolverConfig& cfg, Backend& backend, double now) {
  if (trim(transcript).empty()) throw EmptyTranscript();

  Resolution res;
  res.stt_latency_s = cfg.stt_latency_s;

  BackendRequest request;
  request.transcript = std::string(transcript);
  request.pose = pose;
  request.visible = visible_objects(layout, pose, cfg.visibility);
  request.prompts.system = build_system_prompt();
  request.prompts.user =
      build_user_prompt(transcript, serialize_context(request.visible, pose), pose, cfg.max_travel);

  BackendResponse response;
  try {
    response = query_backend(request, backend);
  } catch (const BackendError& e) {
    res.outcome = Outcome::BackendError;
    res.error = e.what();
    return res;
  }
  res.llm_latency_s = response.latency_s;
  res.response_text = response.text;

  const std::optional<Vec3> raw = parse_target(response.text);
  if (!raw) {
    res.outcome = Outcome::NoTarget;
    return res;
  }
  res.raw_target = raw;

  // Height from the model is ignored; all motion happens on the ground plane.
  const Vec3 ground{raw->x, 0.0, raw->z};
  const Vec3 snapped = nearest_walkable_point(layout, ground, pose.yaw);
  res.snapped_target = snapped;
  if (ground_distance(pose.position, snapped) > cfg.max_travel + 1e-9) {
    res.outcome = Outcome::OutOfRange;
    return res;
  }
  res.outcome = Outcome::Scheduled;
  res.schedule = ScheduledTeleport{snapped, now + cfg.teleport_delay};
  return res;
}

}  // namespace wayfarer
