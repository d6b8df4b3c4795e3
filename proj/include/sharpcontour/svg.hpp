#pragma once

#include "sharpcontour/geometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace sharpcontour {

struct SvgLayer {
    std::vector<Polygon> rings;  // math coordinates
    std::string color = "#000000";
    double stroke_width = 1.0;
    double opacity = 1.0;
    std::string label;
};

/// Overlay-accurate rendering: 1 SVG unit = 1 px of the source raster,
/// y flipped back to image orientation. Output is byte-deterministic.
std::string render_svg(int width, int height, std::span<const SvgLayer> layers);

}  // namespace sharpcontour
