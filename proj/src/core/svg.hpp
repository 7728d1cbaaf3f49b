#pragma once

#include <string>

#include "canvas.hpp"

namespace ppg {

struct RenderOptions {
  double margin = 10.0;       // mm around the drawing
  double thick_width = 0.5;   // mm
  double thin_width = 0.25;   // mm
  bool background = false;    // white backdrop path under the drawing
};

/// "#RRGGBB" for color index 0..15.
const char* palette_color(std::int64_t index);

/// SVG 1.1 document, one `<g>` per visible element in id order. Coordinates
/// are paper millimetres with Y pointing up in the drawing and down in SVG.
std::string render_svg(const Canvas& canvas, const RenderOptions& options = {});

}  // namespace ppg
