#pragma once

#include <cstddef>
#include <string>

#include "smart/trace.hpp"

namespace smart {

/// Standalone SVG of tick `index`: layers static, tree, zones, path, agents.
/// Throws TraceError when the tick does not exist.
std::string render_snapshot(const TraceData& trace, std::size_t index, double pixels_per_meter = 20.0);

}  // namespace smart
