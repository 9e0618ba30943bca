// Regenerates the bundled fixtures under data/fixtures (or the given directory).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include <fmt/format.h>

#include "wayfarer/agents.hpp"
#include "wayfarer/features.hpp"
#include "wayfarer/synthetic_gaze.hpp"

namespace fs = std::filesystem;
using namespace wayfarer;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  std::cout << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path(WAYFARER_DATA_DIR) / "fixtures";
  fs::create_directories(dir);

  // 100 s recordings give five 20 s windows each: 55/56/19 recordings become
  // 275/280/95 rows, and a stratified 20 % split then holds out 55/56/19.
  const std::vector<std::pair<std::string, int>> plan = {{"llm", 55}, {"steering", 56}, {"teleport", 19}};
  std::vector<gaze::FeatureVector> rows;
  std::uint64_t seed = 1000;
  for (const auto& [label, recordings] : plan) {
    const auto profile = gaze::profile_for(label);
    for (int r = 0; r < recordings; ++r) {
      const auto samples = gaze::synthesize_recording(profile, 100.0, seed++);
      for (auto& row : gaze::process_recording(samples, label)) rows.push_back(std::move(row));
    }
  }
  write(dir / "features_650.csv", gaze::format_feature_matrix(rows));

  write(dir / "gaze_65s.csv", gaze::format_gaze_log(gaze::synthesize_recording(gaze::profile_for("llm"), 65.0, 7)));

  const TownLayout layout = load_scene(default_scene_path());
  for (Technique t : {Technique::Teleport, Technique::Steering, Technique::LlmDriven}) {
    write(dir / fmt::format("script_{}.json", to_string(t)), script_to_json(agent_script(layout, t)).dump(2) + "\n");
  }

  write(dir / "sus.csv", "# ten items, 1..5\n5,1,5,1,5,1,5,1,5,1\n5,5,5,5,5,5,5,5,5,5\n3,2,4,2,4,1,5,2,4,2\n");
  write(dir / "csqvr.csv", "# six items, 0..6\n6,6,6,6,6,6\n0,1,0,0,2,1\n");
  write(dir / "tlx.csv", "# mental, physical, temporal, performance, effort, frustration\n40,10,35,20,45,15\n");
  write(dir / "ipq.csv", "# fourteen items, 0..6\n5,4,2,5,4,5,3,4,2,4,2,3,3,2\n");
  return 0;
}
