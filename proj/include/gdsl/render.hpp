#pragma once

// Deterministic SVG 1.1 output.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gdsl/format.hpp"
#include "gdsl/layout.hpp"
#include "gdsl/scene.hpp"

namespace gdsl {

struct SvgConfig {
  double width = 400;
  double height = 400;
  std::optional<std::array<double, 4>> view_box;  // min-x, min-y, width, height
  int decimals = 4;                                // clamped to [0, 8]
  std::optional<std::string> background;           // hex color, painted first
  bool annotate = false;  // data-container-id on every element
  bool fit = false;       // viewBox around the scene bound (ignored with view_box)
};

std::string render_svg(const SceneNode& scene, const SvgConfig& cfg = {});

// Instantiates and renders; a document without a root gives an empty canvas.
std::string render_document(const GlyphDocument& doc, const SvgConfig& cfg = {},
                            const LayoutOptions& layout = {},
                            std::vector<std::string>* warnings = nullptr);

}  // namespace gdsl
