#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace wayfarer::questionnaire {

// Items in 1..5, ten of them. Result in [0, 100].
double score_sus(const std::vector<double>& items);

struct IpqItem {
  std::string subscale;
  bool reversed = false;
};

// One entry per item position, 14 in the standard form.
using IpqMapping = std::vector<IpqItem>;

IpqMapping parse_ipq_mapping(const nlohmann::json& j);
IpqMapping load_ipq_mapping(const std::filesystem::path& path);
std::filesystem::path default_ipq_mapping_path();

// Items in 0..6; reversed items become 6 - x. Mean per subscale.
std::map<std::string, double> score_ipq(const std::vector<double>& items, const IpqMapping& mapping);

struct CsqVrScore {
  double nausea = 0.0;
  double vestibular = 0.0;
  double oculomotor = 0.0;
  double total = 0.0;
};

// Six items in 0..6, paired (1,2) (3,4) (5,6).
CsqVrScore score_csqvr(const std::vector<double>& items);

// Six subscales in 0..100; unweighted mean.
double score_tlx(const std::vector<double>& items);

enum class Kind { Sus, Ipq, CsqVr, Tlx };
Kind parse_kind(std::string_view name);

// One respondent per non-empty line, comma-separated; '#' starts a comment.
std::vector<std::vector<double>> parse_responses(std::string_view text);

// Scores every respondent, one JSON object each.
nlohmann::json score_all(Kind kind, const std::vector<std::vector<double>>& rows, const IpqMapping* mapping);

}  // namespace wayfarer::questionnaire
