#pragma once

#include <string>

#include "wayfarer/world.hpp"

namespace testing {

inline const wayfarer::TownLayout& town() {
  static const wayfarer::TownLayout layout = wayfarer::load_scene(wayfarer::default_scene_path());
  return layout;
}

// The default road grid with a custom object list.
inline wayfarer::TownLayout town_with(std::vector<wayfarer::SceneObject> objects) {
  wayfarer::TownLayout t = town();
  t.objects = std::move(objects);
  return t;
}

inline wayfarer::SceneObject object(std::string id, std::string name, std::string color, std::string tag,
                                    wayfarer::Vec3 p) {
  return {std::move(id), std::move(name), std::move(color), std::move(tag), p, std::nullopt};
}

inline std::string fixture(const std::string& name) { return std::string(WAYFARER_DATA_DIR) + "/fixtures/" + name; }

}  // namespace testing
