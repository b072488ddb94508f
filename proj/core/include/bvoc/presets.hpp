#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bvoc/experiments.hpp"

namespace bvoc::presets {

/// Names of the embedded analysis presets, one per table row.
std::vector<std::string> names();

/// Embedded JSON text of a preset; throws std::out_of_range listing the
/// available names when unknown.
std::string_view json(std::string_view name);

experiments::AnalysisConfig get(std::string_view name);

/// Built-in leaf/channel defaults.
receiver::LeafParams default_leaf();

}  // namespace bvoc::presets
