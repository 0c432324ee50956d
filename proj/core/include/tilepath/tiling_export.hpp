#pragma once

#include "tilepath/tiling.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tilepath {

struct ExportOptions {
    int polyline_points = 64;  // samples per boundary segment
    std::optional<std::vector<int>> highlight_support;
    int svg_width = 900;
    int svg_height = 600;
};

/// Tiles and edges with boundary polylines sampled at the configured
/// resolution. Deterministic key order and number formatting.
std::string tiling_to_json(const TilingGraph& graph, const BetaTransform& bt,
                           const ExportOptions& opts = {});

/// Filled polygon per tile on log-beta / log-alpha axes, color-keyed by
/// support size; the highlighted support, when given, is stroked.
std::string tiling_to_svg(const TilingGraph& graph, const BetaTransform& bt,
                          const ExportOptions& opts = {});

}  // namespace tilepath
