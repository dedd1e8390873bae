#pragma once

// Structure recovery from flat vector graphics: congruent elements are
// grouped, each group is explained by the simplest repetition model that
// fits, and the result is emitted as containers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gdsl/geometry.hpp"
#include "gdsl/model.hpp"
#include "gdsl/scene.hpp"

namespace gdsl {

struct FlatElement {
  Primitive primitive;
  AffineMatrix world;
  std::optional<std::string> source_id;
};

// Parses the supported SVG subset (svg, g, rect, circle, polygon, line, path,
// text, image; title/desc/metadata are skipped). Presentation attributes and
// `style` declarations for fill/stroke/stroke-width/opacity are read, colors
// normalized to hex. Throws MalformedInput, UnsupportedElement (field = tag)
// and EmptyInput.
std::vector<FlatElement> import_svg(std::string_view svg);

// Leaves of a scene with their world matrices.
std::vector<FlatElement> flatten_scene(const SceneNode& scene);

struct ShapeSignature {
  PrimitiveKind kind = PrimitiveKind::rect;
  std::vector<Vec2> points;  // centroid at origin, RMS radius 1
  bool axis_ambiguous = false;  // principal axis undefined; rotation left as is
  std::string style_key;        // fill|stroke|strokeWidth|opacity
};

// Throws DegenerateShape when the outline has no extent.
ShapeSignature normalize_shape(const Primitive& p, const AffineMatrix& world = AffineMatrix::identity());

// Same kind and style, and point sets equal up to rotation and start point
// within `tol` (RMS, in units of the normalized radius).
bool signatures_match(const ShapeSignature& a, const ShapeSignature& b, double tol);

// Partition by congruence, groups in order of first occurrence. Members with
// identical local geometry share a group even when their world matrices are
// not similar to each other.
std::vector<std::vector<std::size_t>> group_by_signature(const std::vector<FlatElement>& elems,
                                                         double tol = 1e-3);

enum class FitModel { translation, rotation, translationScale, rotationScale, axisScale, none };
std::string_view to_string(FitModel m);

struct FitResult {
  FitModel model = FitModel::none;
  std::vector<std::size_t> order;  // group positions in instance order
  double residual = 0.0;           // RMS, document units
  double diameter = 0.0;

  Vec2 step;                  // cartesian models
  Vec2 center;                // rotation models
  double delta_angle_deg = 0;  // rotation models
  Vec2 scale_origin;          // scale models: fixed point of the scaling
  std::vector<double> scales;    // uniform scale per instance, first = 1
  std::vector<double> scales_x;  // axisScale
  std::vector<double> scales_y;
  std::string sequence;  // "arithmetic", "geometric" or empty
};

// Models tried in order translation, rotation, translationScale,
// rotationScale, axisScale; the first with residual < tol * diameter wins.
FitResult fit_transform_chain(const std::vector<FlatElement>& group, double tol = 1e-3);

struct InferReport {
  std::vector<FitResult> fits;  // one per group of two or more
};

// Throws EmptyInput.
GlyphDocument infer_structure(const std::vector<FlatElement>& elems, double tol = 1e-3,
                              InferReport* report = nullptr);

}  // namespace gdsl
