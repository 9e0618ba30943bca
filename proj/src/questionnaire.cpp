#include "wayfarer/questionnaire.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "wayfarer/error.hpp"

namespace wayfarer::questionnaire {
namespace {

void check(std::string_view form, const std::vector<double>& items, std::size_t count, double lo, double hi) {
  if (items.size() != count) {
    throw ValidationError(fmt::format("{}: expected {} items, got {}", form, count, items.size()));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!std::isfinite(items[i]) || items[i] < lo || items[i] > hi) {
      throw RangeError(fmt::format("{} item {}: {} outside [{}, {}]", form, i + 1, items[i], lo, hi));
    }
  }
}

}  // namespace

double score_sus(const std::vector<double>& items) {
  check("SUS", items, 10, 1, 5);
  double s = 0.0;
  for (std::size_t i = 0; i < 10; ++i) s += (i % 2 == 0) ? items[i] - 1.0 : 5.0 - items[i];
  return 2.5 * s;
}

IpqMapping parse_ipq_mapping(const nlohmann::json& j) {
  const nlohmann::json& items = j.contains("items") ? j.at("items") : j;
  if (!items.is_array() || items.empty()) throw ParseError("ipq mapping: expected a non-empty 'items' array");
  IpqMapping m;
  for (const auto& it : items) {
    if (!it.contains("subscale")) throw ParseError("ipq mapping: item lacks 'subscale'");
    m.push_back({it.at("subscale").get<std::string>(), it.value("reversed", false)});
  }
  return m;
}

IpqMapping load_ipq_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ipq mapping " + path.string());
  try {
    return parse_ipq_mapping(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ipq mapping: ") + e.what());
  }
}

std::filesystem::path default_ipq_mapping_path() {
  return std::filesystem::path(WAYFARER_DATA_DIR) / "ipq_mapping.json";
}

std::map<std::string, double> score_ipq(const std::vector<double>& items, const IpqMapping& mapping) {
  check("IPQ", items, mapping.size(), 0, 6);
  std::map<std::string, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& [sum, n] = acc[mapping[i].subscale];
    sum += mapping[i].reversed ? 6.0 - items[i] : items[i];
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [name, sn] : acc) out[name] = sn.first / sn.second;
  return out;
}

CsqVrScore score_csqvr(const std::vector<double>& items) {
  check("CSQ-VR", items, 6, 0, 6);
  CsqVrScore s;
  s.nausea = items[0] + items[1];
  s.vestibular = items[2] + items[3];
  s.oculomotor = items[4] + items[5];
  s.total = s.nausea + s.vestibular + s.oculomotor;
  return s;
}

double score_tlx(const std::vector<double>& items) {
  check("NASA-TLX", items, 6, 0, 100);
  return std::accumulate(items.begin(), items.end(), 0.0) / 6.0;
}

Kind parse_kind(std::string_view name) {
  if (name == "sus") return Kind::Sus;
  if (name == "ipq") return Kind::Ipq;
  if (name == "csqvr") return Kind::CsqVr;
  if (name == "tlx") return Kind::Tlx;
  throw ValidationError(fmt::format("unknown questionnaire '{}'", name));
}

std::vector<std::vector<double>> parse_responses(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<double> row;
    std::string_view rest = line;
    bool any = line.find_first_not_of(" \t\r") != std::string::npos;
    if (!any) continue;
    for (;;) {
      const auto comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(fmt::format("responses line {}: bad value '{}'", line_no, field));
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json score_all(Kind kind, const std::vector<std::vector<double>>& rows, const IpqMapping* mapping) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    switch (kind) {
      case Kind::Sus:
        out.push_back({{"sus", score_sus(r)}});
        break;
      case Kind::Ipq: {
        if (!mapping) throw ValidationError("IPQ scoring needs a mapping");
        out.push_back(score_ipq(r, *mapping));
        break;
      }
      case Kind::CsqVr: {
        const CsqVrScore s = score_csqvr(r);
        out.push_back({{"nausea", s.nausea}, {"vestibular", s.vestibular}, {"oculomotor", s.oculomotor}, {"total", s.total}});
        break;
      }
      case Kind::Tlx:
        out.push_back({{"tlx", score_tlx(r)}});
        break;
    }
  }
  return out;
}

}  // namespace wayfarer::questionnaire
