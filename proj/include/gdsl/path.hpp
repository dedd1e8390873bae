#pragma once

// SVG path data: parsing to absolute segments, sampling, transformation.

#include <string>
#include <string_view>
#include <vector>

#include "gdsl/geometry.hpp"

namespace gdsl {

struct PathSegment {
  enum class Kind { move, line, quad, cubic, arc, close };
  Kind kind = Kind::move;
  Vec2 start;  // current point before the segment
  Vec2 c1, c2; // control points (quad uses c1)
  Vec2 end;
  double rx = 0, ry = 0, x_axis_rotation = 0;
  bool large_arc = false, sweep = false;
};

// Handles M L H V C S Q T A Z in absolute and relative forms. Shorthand
// commands are expanded (H/V -> L, S -> C, T -> Q). Throws MalformedInput.
std::vector<PathSegment> parse_path(std::string_view d);

// One polyline per subpath; every drawing segment contributes `samples`
// points after its start.
std::vector<std::vector<Vec2>> sample_path(const std::vector<PathSegment>& segments,
                                           int samples);

// Rewrites the path under `m`. Arcs become cubic Beziers so any affine map
// (including shear) is exact.
std::string transform_path(std::string_view d, const AffineMatrix& m);

}  // namespace gdsl
