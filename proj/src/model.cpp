#include "gdsl/model.hpp"

#include "gdsl/error.hpp"

namespace gdsl {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

constexpr std::pair<std::string_view, CoordKind> kCoordKinds[] = {
    {"cartesian", CoordKind::cartesian}, {"polar", CoordKind::polar}};
constexpr std::pair<std::string_view, PrimitiveKind> kPrimitiveKinds[] = {
    {"rect", PrimitiveKind::rect},       {"circle", PrimitiveKind::circle},
    {"polygon", PrimitiveKind::polygon}, {"line", PrimitiveKind::line},
    {"path", PrimitiveKind::path},       {"text", PrimitiveKind::text},
    {"image", PrimitiveKind::image}};
constexpr std::pair<std::string_view, ArrangementMode> kModes[] = {
    {"uniform", ArrangementMode::uniform},
    {"stacked", ArrangementMode::stacked},
    {"flexible", ArrangementMode::flexible}};
constexpr std::pair<std::string_view, Axis> kAxes[] = {{"x", Axis::x}, {"y", Axis::y}};
constexpr std::pair<std::string_view, RelType> kRelTypes[] = {
    {"top", RelType::top},     {"bottom", RelType::bottom}, {"left", RelType::left},
    {"right", RelType::right}, {"center", RelType::center}};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::UnknownChild: return "UnknownChild";
    case ErrorCode::UnknownPath: return "UnknownPath";
    case ErrorCode::PathKindMismatch: return "PathKindMismatch";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::BadPrimitiveParams: return "BadPrimitiveParams";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::ReparentConflict: return "ReparentConflict";
    case ErrorCode::RelationOutsideChildren: return "RelationOutsideChildren";
    case ErrorCode::RelationCycle: return "RelationCycle";
    case ErrorCode::DuplicateChild: return "DuplicateChild";
    case ErrorCode::EmptyChildren: return "EmptyChildren";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::BadExpression: return "BadExpression";
    case ErrorCode::BadScale: return "BadScale";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::EmptyGeometry: return "EmptyGeometry";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::MissingPrevBBox: return "MissingPrevBBox";
    case ErrorCode::UnsupportedArrangement: return "UnsupportedArrangement";
    case ErrorCode::OverConstrained: return "OverConstrained";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ReplayDivergence: return "ReplayDivergence";
    case ErrorCode::UnsupportedElement: return "UnsupportedElement";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownSlot: return "UnknownSlot";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::NotAProposal: return "NotAProposal";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string field,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      field_(std::move(field)),
      index_(index),
      detail_(std::move(message)) {}

bool is_valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == ' ' || ch == '-';
    if (!ok) return false;
  }
  return true;
}

double Primitive::number(const std::string& name, double fallback) const {
  auto it = attrs.find(name);
  if (it == attrs.end()) return fallback;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  return fallback;
}

std::string Primitive::string(const std::string& name, const std::string& fallback) const {
  auto it = attrs.find(name);
  if (it == attrs.end()) return fallback;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  return fallback;
}

const Points* Primitive::points(const std::string& name) const {
  auto it = attrs.find(name);
  if (it == attrs.end()) return nullptr;
  return std::get_if<Points>(&it->second);
}

const Container* GlyphDocument::find(const ContainerId& id) const {
  auto it = containers.find(id);
  return it == containers.end() ? nullptr : &it->second;
}

Container* GlyphDocument::find(const ContainerId& id) {
  auto it = containers.find(id);
  return it == containers.end() ? nullptr : &it->second;
}

std::vector<ContainerId> children_of(const Container& c) {
  if (const auto* r = std::get_if<RepeaterBody>(&c.body)) return {r->child};
  if (const auto* k = std::get_if<CompositorBody>(&c.body)) return k->children;
  return {};
}

std::string_view to_string(CoordKind k) { return name_of(k, kCoordKinds); }
std::string_view to_string(PrimitiveKind k) { return name_of(k, kPrimitiveKinds); }
std::string_view to_string(ArrangementMode m) { return name_of(m, kModes); }
std::string_view to_string(Axis a) { return name_of(a, kAxes); }
std::string_view to_string(RelType t) { return name_of(t, kRelTypes); }

std::string_view kind_name(const Container& c) {
  if (c.is_basic()) return "basic";
  if (c.is_repeater()) return "repeater";
  return "compositor";
}

std::optional<CoordKind> parse_coord_kind(std::string_view s) { return lookup(s, kCoordKinds); }
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s) {
  return lookup(s, kPrimitiveKinds);
}
std::optional<ArrangementMode> parse_arrangement_mode(std::string_view s) {
  return lookup(s, kModes);
}
std::optional<Axis> parse_axis(std::string_view s) { return lookup(s, kAxes); }
std::optional<RelType> parse_rel_type(std::string_view s) { return lookup(s, kRelTypes); }

}  // namespace gdsl
