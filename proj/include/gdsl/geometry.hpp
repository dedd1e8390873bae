#pragma once

#include <optional>
#include <vector>

#include "gdsl/model.hpp"

namespace gdsl {

struct SceneNode;

// Maps (x, y) to (a*x + c*y + e, b*x + d*y + f); same layout as SVG matrix().
struct AffineMatrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  friend bool operator==(const AffineMatrix&, const AffineMatrix&) = default;

  Vec2 apply(Vec2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  Vec2 apply_linear(Vec2 v) const { return {a * v.x + c * v.y, b * v.x + d * v.y}; }
  double determinant() const { return a * d - b * c; }
  bool is_identity() const;
  bool is_finite() const;
  AffineMatrix inverse() const;  // throws DegenerateScale when singular

  static AffineMatrix identity() { return {}; }
  static AffineMatrix translation(Vec2 t) { return {1, 0, 0, 1, t.x, t.y}; }
  static AffineMatrix scaling(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
  // Positive angles turn +x towards +y (clockwise on screen, y down).
  static AffineMatrix rotation_deg(double deg, Vec2 center = {});
};

// Exact at multiples of 90 degrees.
double sin_deg(double deg);
double cos_deg(double deg);

// translate * rotate(center, angle) * scale. Throws DegenerateScale.
AffineMatrix to_matrix(const Transform& t);

// compose(outer, inner)(p) == outer(inner(p)).
AffineMatrix compose(const AffineMatrix& outer, const AffineMatrix& inner);

// Splits a shear-free matrix into scale -> rotate (about the origin) ->
// translate. Returns nullopt when the linear part shears.
std::optional<Transform> decompose(const AffineMatrix& m, double tol = 1e-9);

struct BBox {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  bool valid = false;

  friend bool operator==(const BBox&, const BBox&) = default;

  static BBox of(double x0, double y0, double x1, double y1) { return {x0, y0, x1, y1, true}; }
  void expand(Vec2 p);
  void unite(const BBox& o);
  double width() const { return valid ? max_x - min_x : 0.0; }
  double height() const { return valid ? max_y - min_y : 0.0; }
  Vec2 center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
  BBox transformed(const AffineMatrix& m) const;
};

enum class AnchorName {
  center,
  topCenter,
  bottomCenter,
  leftCenter,
  rightCenter,
  topLeft,
  topRight,
  bottomLeft,
  bottomRight
};

Vec2 anchor_point(const BBox& b, AnchorName name);

// Estimated text box: width 0.6 * fontSize per character, height fontSize,
// baseline at y.
BBox text_box(const Primitive& text, bool middle_anchor);

// Sampled outline in local coordinates. Circles and path segments use
// `samples_per_segment` points; rect/text/image outlines sample each edge.
std::vector<Vec2> primitive_outline(const Primitive& p, int samples_per_segment = 64,
                                    bool middle_anchor = false);

// Axis-aligned bound of the primitive under `m`. Throws EmptyGeometry for a
// polygon without points.
BBox primitive_bbox(const Primitive& p, const AffineMatrix& m = AffineMatrix::identity(),
                    bool middle_anchor = false);

// Bound of every leaf under the node, including the node's own matrix.
BBox node_bbox(const SceneNode& n);
// Same, with an extra outer matrix applied.
BBox node_bbox(const SceneNode& n, const AffineMatrix& outer);

}  // namespace gdsl
