#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwguide/scenario.hpp"

namespace fwguide {

/// Built-in scenario names in sorted order.
std::vector<std::string> preset_names();

/// Empty when no preset has this name.
std::optional<Scenario> find_preset(std::string_view name);

/// Throws ConfigError for an unknown name.
Scenario preset(std::string_view name);

/// Six planar beacons at (1,1), (0,2), (-1,1), (-1,-1), (0,-2), (1,-1), unit weights.
BeaconField hexagon_field();

/// Eight unit-weight beacons at the vertices (+-1, +-1, +-1).
BeaconField cube_field();

}  // namespace fwguide
