#include "bvoc/presets.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace bvoc::presets {

namespace {

struct Preset {
  std::string_view name;
  std::string_view json;
};

// Shared settings: u = 25 m/s, D = 0.1 m^2/s, M = 1.1e-9 kg, tau_r = 0.05 s,
// 200 points per sweep starting one step from the source.
constexpr std::array<Preset, 11> kPresets{{
    {"distance", R"({
  "name": "distance", "kind": "distance",
  "grid": {"start": 0.01, "stop": 2.0, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "threshold_fraction": 0.55
})"},
    {"distance_snr", R"({
  "name": "distance_snr", "kind": "distance_snr",
  "grid": {"start": 0.01, "stop": 2.0, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9
})"},
    {"distance_delay", R"({
  "name": "distance_delay", "kind": "distance_delay",
  "grid": {"start": 0.01, "stop": 2.0, "points": 200},
  "channel": {"u": 1, "D": 0.1, "h": 1},
  "noise": {"enabled": false}
})"},
    {"distance_mass", R"({
  "name": "distance_mass", "kind": "distance_mass",
  "grid": {"start": 0.01, "stop": 2.0, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "levels": [1, 3, 5, 10]
})"},
    {"wind", R"({
  "name": "wind", "kind": "wind",
  "grid": {"start": 0.0275, "stop": 5.5, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "levels": [1, 25, 50, 100]
})"},
    {"wind_delay", R"({
  "name": "wind_delay", "kind": "wind_delay",
  "grid": {"start": 0.5, "stop": 100, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"x": 10},
  "noise": {"enabled": false}
})"},
    {"eddy", R"({
  "name": "eddy", "kind": "eddy",
  "grid": {"start": 0.0075, "stop": 1.5, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "levels": [0.1, 10, 35, 100]
})"},
    {"noise", R"({
  "name": "noise", "kind": "noise",
  "grid": {"start": 0.0075, "stop": 1.5, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "levels": [1, 3, 5, 7, 9]
})"},
    {"noise_snr", R"({
  "name": "noise_snr", "kind": "noise_snr",
  "grid": {"start": 1, "stop": 10, "points": 10},
  "reference_grid": {"start": 0.0075, "stop": 1.5, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"x": 0.75, "y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9
})"},
    {"threshold", R"({
  "name": "threshold", "kind": "threshold",
  "grid": {"start": 0.005, "stop": 1.0, "points": 200},
  "reference_grid": {"start": 0.01, "stop": 2.0, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "mass": 1.1e-9, "levels": [0.025, 0.05, 0.125, 0.5]
})"},
    {"rsk", R"({
  "name": "rsk", "kind": "rsk",
  "grid": {"start": 0.0075, "stop": 1.5, "points": 200},
  "channel": {"u": 25, "D": 0.1, "h": 1},
  "receiver": {"y": 0, "z": 1, "tau_r": 0.05},
  "rsk": {"mass_a": 1.1e-9, "mass_b": 2.75e-9, "lo": 2.0, "hi": 2.5},
  "levels": [1, 5, 10, 15]
})"},
}};

}  // namespace

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string_view json(std::string_view name) {
  for (const auto& p : kPresets)
    if (p.name == name) return p.json;
  std::string list;
  for (const auto& p : kPresets) {
    list += list.empty() ? "" : ", ";
    list += p.name;
  }
  throw std::out_of_range("unknown preset '" + std::string(name) + "' (available: " + list + ")");
}

experiments::AnalysisConfig get(std::string_view name) {
  return experiments::config_from_json(json(name));
}

receiver::LeafParams default_leaf() { return receiver::LeafParams{}; }

}  // namespace bvoc::presets
