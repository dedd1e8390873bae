#pragma once

// Glyph document model: a tree of basic, repeater and compositor containers.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gdsl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

class ContainerId {
 public:
  ContainerId() = default;
  explicit ContainerId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const ContainerId&, const ContainerId&) = default;
  friend bool operator==(const ContainerId&, const ContainerId&) = default;

 private:
  std::string value_;
};

// Ids are non-empty and drawn from [A-Za-z0-9_ -].
bool is_valid_id(std::string_view id);

enum class CoordKind { cartesian, polar };

struct CoordinateSystem {
  CoordKind kind = CoordKind::cartesian;
  Vec2 origin;
  friend bool operator==(const CoordinateSystem&, const CoordinateSystem&) = default;
};

struct Rotation {
  Vec2 center;
  double angle_deg = 0.0;
  friend bool operator==(const Rotation&, const Rotation&) = default;
};

struct Scale {
  double sx = 1.0;
  double sy = 1.0;
  friend bool operator==(const Scale&, const Scale&) = default;
};

// Local point p maps to the parent as translate(rotate(scale(p))).
struct Transform {
  Vec2 translate;
  Rotation rotate;
  Scale scale;
  friend bool operator==(const Transform&, const Transform&) = default;
};

enum class PrimitiveKind { rect, circle, polygon, line, path, text, image };

using Points = std::vector<Vec2>;
using AttrValue = std::variant<double, std::string, Points>;
using AttrMap = std::map<std::string, AttrValue>;

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::rect;
  AttrMap attrs;

  friend bool operator==(const Primitive&, const Primitive&) = default;

  double number(const std::string& name, double fallback = 0.0) const;
  std::string string(const std::string& name, const std::string& fallback = {}) const;
  const Points* points(const std::string& name) const;
};

enum class ArrangementMode { uniform, stacked, flexible };
enum class Axis { x, y };

// Fields that do not apply to the owning coordinate kind stay at their defaults.
struct Arrangement {
  ArrangementMode mode = ArrangementMode::uniform;
  Vec2 step;                     // uniform, cartesian
  double radius = 0.0;           // uniform, polar
  double start_angle_deg = 0.0;  // uniform, polar
  double delta_angle_deg = 0.0;  // uniform, polar
  Axis axis = Axis::x;           // stacked, cartesian
  double gap = 0.0;              // stacked, cartesian
  friend bool operator==(const Arrangement&, const Arrangement&) = default;
};

enum class RelType { top, bottom, left, right, center };

struct SpatialRelation {
  ContainerId source;
  ContainerId target;
  RelType type = RelType::top;
  Vec2 distance;  // +x right, +y down
  friend bool operator==(const SpatialRelation&, const SpatialRelation&) = default;
};

using Scalar = std::variant<double, std::string>;

struct ValueList {
  std::vector<Scalar> values;
  friend bool operator==(const ValueList&, const ValueList&) = default;
};

struct Expression {
  std::string text;
  friend bool operator==(const Expression&, const Expression&) = default;
};

using DataSource = std::variant<ValueList, Expression>;

struct LinearScale {
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  double range_lo = 0.0;
  double range_hi = 1.0;
  friend bool operator==(const LinearScale&, const LinearScale&) = default;
};

struct DataBinding {
  std::string attribute_path;
  DataSource source;
  std::optional<LinearScale> scale;
  friend bool operator==(const DataBinding&, const DataBinding&) = default;
};

struct BasicBody {
  Primitive primitive;
  friend bool operator==(const BasicBody&, const BasicBody&) = default;
};

struct RepeaterBody {
  ContainerId child;
  int count = 1;
  Arrangement arrangement;
  friend bool operator==(const RepeaterBody&, const RepeaterBody&) = default;
};

struct CompositorBody {
  std::vector<ContainerId> children;
  std::vector<SpatialRelation> relations;
  friend bool operator==(const CompositorBody&, const CompositorBody&) = default;
};

using ContainerBody = std::variant<BasicBody, RepeaterBody, CompositorBody>;

struct Container {
  ContainerId id;
  ContainerBody body;
  CoordinateSystem coord;
  Transform transform;
  std::vector<DataBinding> bindings;

  friend bool operator==(const Container&, const Container&) = default;

  bool is_basic() const { return std::holds_alternative<BasicBody>(body); }
  bool is_repeater() const { return std::holds_alternative<RepeaterBody>(body); }
  bool is_compositor() const { return std::holds_alternative<CompositorBody>(body); }
};

struct GlyphDocument {
  std::optional<ContainerId> root;
  std::map<ContainerId, Container> containers;
  std::uint64_t rng_seed = 0;
  std::int64_t version = 0;

  friend bool operator==(const GlyphDocument&, const GlyphDocument&) = default;

  const Container* find(const ContainerId& id) const;
  Container* find(const ContainerId& id);
  bool empty() const { return containers.empty(); }
};

// Child ids in declaration order (repeater child, or compositor children).
std::vector<ContainerId> children_of(const Container& c);

std::string_view to_string(CoordKind k);
std::string_view to_string(PrimitiveKind k);
std::string_view to_string(ArrangementMode m);
std::string_view to_string(Axis a);
std::string_view to_string(RelType t);
std::string_view kind_name(const Container& c);  // "basic" | "repeater" | "compositor"

std::optional<CoordKind> parse_coord_kind(std::string_view s);
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s);
std::optional<ArrangementMode> parse_arrangement_mode(std::string_view s);
std::optional<Axis> parse_axis(std::string_view s);
std::optional<RelType> parse_rel_type(std::string_view s);

}  // namespace gdsl

template <>
struct std::hash<gdsl::ContainerId> {
  std::size_t operator()(const gdsl::ContainerId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
