#pragma once

#include <string>
#include <vector>

#include "magbend/curve.hpp"

namespace magbend {

struct LabeledCurve {
    std::string label;
    Curve2D curve;
};

struct SvgOptions {
    int width_px = 800;
    int height_px = 600;
    std::string title;
};

// One polyline per curve on a mm-coordinate grid with axes, tick labels and
// a legend. Valid SVG 1.1, byte-deterministic. Empty curves are skipped and
// noted in a leading SVG comment.
std::string render_svg(const std::vector<LabeledCurve>& curves, const SvgOptions& opts = {});

}  // namespace magbend
