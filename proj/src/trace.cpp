#include <fstream>
#include <sstream>

#include "wayfarer/error.hpp"
#include "wayfarer/locomotion.hpp"

namespace wayfarer {

nlohmann::json vec_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 3) return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (j.is_object()) return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
  throw ParseError("expected [x, y, z]");
}

nlohmann::json to_json(const TraceEvent& event) {
  return {{"t", event.t}, {"kind", to_string(event.kind)}, {"payload", event.payload}};
}

TraceEvent trace_event_from_json(const nlohmann::json& doc) {
  try {
    return {doc.at("t").get<double>(), parse_trace_kind(doc.at("kind").get<std::string>()), doc.at("payload")};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trace record: ") + e.what());
  }
}

std::string to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> parse_jsonl(std::string_view text) {
  std::vector<TraceEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trace_event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("trace line: ") + e.what());
    }
  }
  return out;
}

std::vector<ScriptInput> parse_script(const nlohmann::json& doc) {
  const nlohmann::json& entries = doc.is_object() ? doc.at("inputs") : doc;
  if (!entries.is_array()) throw ParseError("script: expected a list of inputs");
  std::vector<ScriptInput> script;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    ScriptInput in;
    try {
      in.t = e.at("t").get<double>();
      if (e.contains("transcript")) in.input.transcript = e["transcript"].get<std::string>();
      if (e.contains("aim")) in.input.aim = vec_from_json(e["aim"]);
      if (e.contains("yaw")) in.input.yaw = e["yaw"].get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("script entry " + std::to_string(i) + ": " + ex.what());
    }
    if (!std::isfinite(in.t) || in.t < 0.0) throw ScriptError("script entry " + std::to_string(i) + ": bad time");
    if (in.input.transcript.empty() && !in.input.aim && !in.input.yaw) {
      throw ScriptError("script entry " + std::to_string(i) + ": needs transcript, aim or yaw");
    }
    script.push_back(std::move(in));
  }
  return script;
}

std::vector<ScriptInput> load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open script file " + path.string());
  try {
    return parse_script(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nlohmann::json script_to_json(const std::vector<ScriptInput>& script) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : script) {
    nlohmann::json e = {{"t", s.t}};
    if (!s.input.transcript.empty()) e["transcript"] = s.input.transcript;
    if (s.input.aim) e["aim"] = vec_json(*s.input.aim);
    if (s.input.yaw) e["yaw"] = *s.input.yaw;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace wayfarer
