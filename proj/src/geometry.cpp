#include "gdsl/geometry.hpp"

#include <cmath>
#include <numbers>

#include "gdsl/error.hpp"
#include "gdsl/path.hpp"
#include "gdsl/scene.hpp"

namespace gdsl {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

void sample_edge(std::vector<Vec2>& out, Vec2 a, Vec2 b, int samples) {
  for (int k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
  }
}

void sample_closed(std::vector<Vec2>& out, const std::vector<Vec2>& corners, int samples) {
  for (std::size_t i = 0; i < corners.size(); ++i) {
    sample_edge(out, corners[i], corners[(i + 1) % corners.size()], samples);
  }
}

std::vector<Vec2> box_corners(const BBox& b) {
  return {{b.min_x, b.min_y}, {b.max_x, b.min_y}, {b.max_x, b.max_y}, {b.min_x, b.max_y}};
}

}  // namespace

bool AffineMatrix::is_identity() const {
  return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0;
}

bool AffineMatrix::is_finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) &&
         std::isfinite(e) && std::isfinite(f);
}

AffineMatrix AffineMatrix::inverse() const {
  const double det = determinant();
  if (det == 0 || !std::isfinite(det)) {
    throw Error(ErrorCode::DegenerateScale, "matrix is not invertible");
  }
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  return {ia, ib, ic, id, -(ia * e + ic * f), -(ib * e + id * f)};
}

AffineMatrix AffineMatrix::rotation_deg(double deg, Vec2 center) {
  const double cs = cos_deg(deg), sn = sin_deg(deg);
  // T(center) * R * T(-center)
  return {cs, sn, -sn, cs, center.x - cs * center.x + sn * center.y,
          center.y - sn * center.x - cs * center.y};
}

double sin_deg(double deg) {
  const double r = std::fmod(deg, 360.0);
  if (std::fmod(r, 90.0) == 0.0) {
    const int q = static_cast<int>(std::lround((r < 0 ? r + 360.0 : r) / 90.0)) % 4;
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    return kSin[q];
  }
  return std::sin(r * kDegToRad);
}

double cos_deg(double deg) {
  const double r = std::fmod(deg, 360.0);
  if (std::fmod(r, 90.0) == 0.0) {
    const int q = static_cast<int>(std::lround((r < 0 ? r + 360.0 : r) / 90.0)) % 4;
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    return kCos[q];
  }
  return std::cos(r * kDegToRad);
}

AffineMatrix compose(const AffineMatrix& m, const AffineMatrix& n) {
  return {m.a * n.a + m.c * n.b,       m.b * n.a + m.d * n.b,
          m.a * n.c + m.c * n.d,       m.b * n.c + m.d * n.d,
          m.a * n.e + m.c * n.f + m.e, m.b * n.e + m.d * n.f + m.f};
}

AffineMatrix to_matrix(const Transform& t) {
  if (t.scale.sx == 0 || t.scale.sy == 0) {
    throw Error(ErrorCode::DegenerateScale, "scale factors must be non-zero", "scale");
  }
  AffineMatrix m = AffineMatrix::scaling(t.scale.sx, t.scale.sy);
  if (t.rotate.angle_deg != 0) m = compose(AffineMatrix::rotation_deg(t.rotate.angle_deg, t.rotate.center), m);
  if (t.translate.x != 0 || t.translate.y != 0) m = compose(AffineMatrix::translation(t.translate), m);
  return m;
}

std::optional<Transform> decompose(const AffineMatrix& m, double tol) {
  const double n1 = std::hypot(m.a, m.b);
  const double n2 = std::hypot(m.c, m.d);
  if (n1 == 0 || n2 == 0) return std::nullopt;
  if (std::abs(m.a * m.c + m.b * m.d) > tol * n1 * n2) return std::nullopt;
  const double theta = std::atan2(m.b, m.a);
  Transform t;
  t.scale.sx = n1;
  t.scale.sy = -m.c * std::sin(theta) + m.d * std::cos(theta);
  t.rotate.angle_deg = theta / kDegToRad;
  t.translate = {m.e, m.f};
  return t;
}

void BBox::expand(Vec2 p) {
  if (!valid) {
    *this = of(p.x, p.y, p.x, p.y);
    return;
  }
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

void BBox::unite(const BBox& o) {
  if (!o.valid) return;
  expand({o.min_x, o.min_y});
  expand({o.max_x, o.max_y});
}

BBox BBox::transformed(const AffineMatrix& m) const {
  BBox out;
  if (!valid) return out;
  for (const auto& p : box_corners(*this)) out.expand(m.apply(p));
  return out;
}

Vec2 anchor_point(const BBox& b, AnchorName name) {
  const double cx = (b.min_x + b.max_x) / 2, cy = (b.min_y + b.max_y) / 2;
  switch (name) {
    case AnchorName::center: return {cx, cy};
    case AnchorName::topCenter: return {cx, b.min_y};
    case AnchorName::bottomCenter: return {cx, b.max_y};
    case AnchorName::leftCenter: return {b.min_x, cy};
    case AnchorName::rightCenter: return {b.max_x, cy};
    case AnchorName::topLeft: return {b.min_x, b.min_y};
    case AnchorName::topRight: return {b.max_x, b.min_y};
    case AnchorName::bottomLeft: return {b.min_x, b.max_y};
    case AnchorName::bottomRight: return {b.max_x, b.max_y};
  }
  return {cx, cy};
}

BBox text_box(const Primitive& text, bool middle_anchor) {
  const double fs = text.number("fontSize");
  const double w = 0.6 * fs * static_cast<double>(utf8_length(text.string("content")));
  const double x = text.number("x"), y = text.number("y");
  const double x0 = middle_anchor ? x - w / 2 : x;
  return BBox::of(x0, y - fs, x0 + w, y);
}

std::vector<Vec2> primitive_outline(const Primitive& p, int samples, bool middle_anchor) {
  std::vector<Vec2> out;
  switch (p.kind) {
    case PrimitiveKind::rect:
    case PrimitiveKind::image: {
      const double x = p.number("x"), y = p.number("y");
      sample_closed(out, box_corners(BBox::of(x, y, x + p.number("width"), y + p.number("height"))),
                    samples);
      break;
    }
    case PrimitiveKind::text:
      sample_closed(out, box_corners(text_box(p, middle_anchor)), samples);
      break;
    case PrimitiveKind::circle: {
      const double cx = p.number("cx"), cy = p.number("cy"), r = p.number("r");
      for (int k = 0; k < samples; ++k) {
        const double t = 2.0 * std::numbers::pi * k / samples;
        out.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
      }
      break;
    }
    case PrimitiveKind::polygon:
      if (const Points* pts = p.points("points")) sample_closed(out, *pts, samples);
      break;
    case PrimitiveKind::line: {
      const Vec2 a{p.number("x1"), p.number("y1")}, b{p.number("x2"), p.number("y2")};
      sample_edge(out, a, b, samples);
      out.push_back(b);
      break;
    }
    case PrimitiveKind::path:
      for (auto& poly : sample_path(parse_path(p.string("d")), samples)) {
        out.insert(out.end(), poly.begin(), poly.end());
      }
      break;
  }
  return out;
}

BBox primitive_bbox(const Primitive& p, const AffineMatrix& m, bool middle_anchor) {
  BBox box;
  switch (p.kind) {
    case PrimitiveKind::rect:
    case PrimitiveKind::image: {
      const double x = p.number("x"), y = p.number("y");
      return BBox::of(x, y, x + p.number("width"), y + p.number("height")).transformed(m);
    }
    case PrimitiveKind::text:
      return text_box(p, middle_anchor).transformed(m);
    case PrimitiveKind::circle: {
      const Vec2 c = m.apply({p.number("cx"), p.number("cy")});
      const double r = p.number("r");
      const double hx = r * std::hypot(m.a, m.c), hy = r * std::hypot(m.b, m.d);
      return BBox::of(c.x - hx, c.y - hy, c.x + hx, c.y + hy);
    }
    case PrimitiveKind::polygon: {
      const Points* pts = p.points("points");
      if (!pts || pts->empty()) throw Error(ErrorCode::EmptyGeometry, "polygon has no points");
      for (const auto& q : *pts) box.expand(m.apply(q));
      return box;
    }
    case PrimitiveKind::line:
      box.expand(m.apply({p.number("x1"), p.number("y1")}));
      box.expand(m.apply({p.number("x2"), p.number("y2")}));
      return box;
    case PrimitiveKind::path:
      for (const auto& poly : sample_path(parse_path(p.string("d")), 64)) {
        for (const auto& q : poly) box.expand(m.apply(q));
      }
      if (!box.valid) throw Error(ErrorCode::EmptyGeometry, "path has no points");
      return box;
  }
  return box;
}

namespace {

void accumulate_bbox(const SceneNode& n, const AffineMatrix& parent, BBox& box) {
  const AffineMatrix m = compose(parent, n.matrix);
  if (n.is_leaf()) {
    box.unite(primitive_bbox(n.primitive, m, n.text_middle));
    return;
  }
  for (const auto& child : n.children) accumulate_bbox(child, m, box);
}

}  // namespace

BBox node_bbox(const SceneNode& n) { return node_bbox(n, AffineMatrix::identity()); }

BBox node_bbox(const SceneNode& n, const AffineMatrix& outer) {
  BBox box;
  accumulate_bbox(n, outer, box);
  return box;
}

std::size_t count_groups(const SceneNode& n) {
  if (n.is_leaf()) return 0;
  std::size_t total = 1;
  for (const auto& c : n.children) total += count_groups(c);
  return total;
}

std::size_t count_leaves(const SceneNode& n) {
  if (n.is_leaf()) return 1;
  std::size_t total = 0;
  for (const auto& c : n.children) total += count_leaves(c);
  return total;
}

namespace {

void collect_leaves(const SceneNode& n, const AffineMatrix& parent, std::vector<WorldLeaf>& out) {
  const AffineMatrix m = compose(parent, n.matrix);
  if (n.is_leaf()) {
    out.push_back({&n, m});
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, m, out);
}

}  // namespace

std::vector<WorldLeaf> world_leaves(const SceneNode& root, const AffineMatrix& outer) {
  std::vector<WorldLeaf> out;
  collect_leaves(root, outer, out);
  return out;
}

}  // namespace gdsl
