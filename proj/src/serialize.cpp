#include "gdsl/serialize.hpp"

#include <cmath>
#include <initializer_list>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/format.hpp"

namespace gdsl {

Json canonical_number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "cannot serialize a non-finite number");
  const std::string text = format_number(x, 6);
  const double v = std::strtod(text.c_str(), nullptr);
  if (text.find('.') == std::string::npos && std::abs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

std::string canonical_dump(const Json& j) {
  try {
    return j.dump(2) + "\n";
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
}

Json parse_json(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, e.what(), {}, e.byte);
  }
}

// --- writers ------------------------------------------------------------------

Json to_json(Vec2 v) { return {{"x", canonical_number(v.x)}, {"y", canonical_number(v.y)}}; }

Json to_json(const Scalar& s) {
  if (const auto* d = std::get_if<double>(&s)) return canonical_number(*d);
  return std::get<std::string>(s);
}

Json to_json(const AttrValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return canonical_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  Json arr = Json::array();
  for (const auto& p : std::get<Points>(v)) {
    arr.push_back(Json::array({canonical_number(p.x), canonical_number(p.y)}));
  }
  return arr;
}

Json to_json(const Primitive& p) {
  Json attrs = Json::object();
  for (const auto& [name, value] : p.attrs) attrs[name] = to_json(value);
  return {{"kind", std::string(to_string(p.kind))}, {"attrs", attrs}};
}

Json to_json(const CoordinateSystem& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"origin", to_json(c.origin)}};
}

Json to_json(const Transform& t) {
  return {{"translate", to_json(t.translate)},
          {"rotate", {{"angleDeg", canonical_number(t.rotate.angle_deg)},
                      {"center", to_json(t.rotate.center)}}},
          {"scale", {{"sx", canonical_number(t.scale.sx)}, {"sy", canonical_number(t.scale.sy)}}}};
}

Json to_json(const SpatialRelation& r) {
  return {{"source", r.source.str()},
          {"target", r.target.str()},
          {"relType", std::string(to_string(r.type))},
          {"distance", to_json(r.distance)}};
}

Json to_json(const LinearScale& s) {
  return {{"domain", Json::array({canonical_number(s.domain_lo), canonical_number(s.domain_hi)})},
          {"range", Json::array({canonical_number(s.range_lo), canonical_number(s.range_hi)})}};
}

Json to_json(const DataSource& s) {
  if (const auto* list = std::get_if<ValueList>(&s)) {
    Json values = Json::array();
    for (const auto& v : list->values) values.push_back(to_json(v));
    return {{"values", values}};
  }
  return {{"expression", std::get<Expression>(s).text}};
}

Json to_json(const DataBinding& b) {
  Json j = to_json(b.source);
  j["path"] = b.attribute_path;
  if (b.scale) j["scale"] = to_json(*b.scale);
  return j;
}

namespace {

Json arrangement_json(const Arrangement& a, CoordKind kind) {
  Json j = {{"mode", std::string(to_string(a.mode))}};
  // Parameters of the owning coordinate kind are always written; stray ones
  // only when set, so invalid documents still round-trip.
  const Arrangement defaults;
  if (kind == CoordKind::cartesian || a.step != defaults.step) j["step"] = to_json(a.step);
  if (kind == CoordKind::cartesian || a.axis != defaults.axis) j["axis"] = std::string(to_string(a.axis));
  if (kind == CoordKind::cartesian || a.gap != defaults.gap) j["gap"] = canonical_number(a.gap);
  if (kind == CoordKind::polar || a.radius != defaults.radius) j["radius"] = canonical_number(a.radius);
  if (kind == CoordKind::polar || a.start_angle_deg != defaults.start_angle_deg) {
    j["startAngleDeg"] = canonical_number(a.start_angle_deg);
  }
  if (kind == CoordKind::polar || a.delta_angle_deg != defaults.delta_angle_deg) {
    j["deltaAngleDeg"] = canonical_number(a.delta_angle_deg);
  }
  return j;
}

}  // namespace

Json to_json(const Container& c) {
  Json j = {{"kind", std::string(kind_name(c))},
            {"coord", to_json(c.coord)},
            {"transform", to_json(c.transform)}};
  Json bindings = Json::array();
  for (const auto& b : c.bindings) bindings.push_back(to_json(b));
  j["bindings"] = bindings;
  if (const auto* b = std::get_if<BasicBody>(&c.body)) {
    j["primitive"] = to_json(b->primitive);
  } else if (const auto* r = std::get_if<RepeaterBody>(&c.body)) {
    j["child"] = r->child.str();
    j["count"] = r->count;
    j["arrangement"] = arrangement_json(r->arrangement, c.coord.kind);
  } else {
    const auto& k = std::get<CompositorBody>(c.body);
    Json children = Json::array();
    for (const auto& id : k.children) children.push_back(id.str());
    Json relations = Json::array();
    for (const auto& r : k.relations) relations.push_back(to_json(r));
    j["children"] = children;
    j["relations"] = relations;
  }
  return j;
}

Json to_json(const GlyphDocument& doc) {
  Json containers = Json::object();
  for (const auto& [id, c] : doc.containers) containers[id.str()] = to_json(c);
  return {{"format", "gdsl"},
          {"version", doc.version},
          {"rngSeed", doc.rng_seed},
          {"root", doc.root ? Json(doc.root->str()) : Json(nullptr)},
          {"containers", containers}};
}

// --- readers ------------------------------------------------------------------

namespace json_read {

void fail(const std::string& ptr, const std::string& msg) {
  throw Error(ErrorCode::SchemaViolation, (ptr.empty() ? std::string("/") : ptr) + ": " + msg,
              ptr.empty() ? "/" : ptr);
}

const Json& object(const Json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  return j;
}

const Json* optional(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& required(const Json& obj, const char* key, const std::string& ptr) {
  const Json* v = optional(obj, key);
  if (!v) fail(ptr + "/" + key, "missing required field");
  return *v;
}

double number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ptr, "number is not finite");
  return v;
}

std::string string(const Json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

std::int64_t integer(const Json& j, const std::string& ptr) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  fail(ptr, "expected an integer");
}

}  // namespace json_read

namespace {

using namespace json_read;

void only_keys(const Json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(ptr + "/" + it.key(), "unknown field");
  }
}

template <class E>
E enum_field(const Json& j, const std::string& ptr, std::optional<E> (*parse)(std::string_view)) {
  const std::string s = string(j, ptr);
  auto v = parse(s);
  if (!v) fail(ptr, "unknown value '" + s + "'");
  return *v;
}

ContainerId id_field(const Json& j, const std::string& ptr) {
  const std::string s = string(j, ptr);
  if (!is_valid_id(s)) fail(ptr, "'" + s + "' is not a valid id");
  return ContainerId(s);
}

Arrangement arrangement_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"mode", "step", "axis", "gap", "radius", "startAngleDeg", "deltaAngleDeg"});
  Arrangement a;
  if (auto* v = optional(j, "mode")) a.mode = enum_field(*v, ptr + "/mode", parse_arrangement_mode);
  if (auto* v = optional(j, "step")) a.step = vec2_from_json(*v, ptr + "/step");
  if (auto* v = optional(j, "axis")) a.axis = enum_field(*v, ptr + "/axis", parse_axis);
  if (auto* v = optional(j, "gap")) a.gap = number(*v, ptr + "/gap");
  if (auto* v = optional(j, "radius")) a.radius = number(*v, ptr + "/radius");
  if (auto* v = optional(j, "startAngleDeg")) a.start_angle_deg = number(*v, ptr + "/startAngleDeg");
  if (auto* v = optional(j, "deltaAngleDeg")) a.delta_angle_deg = number(*v, ptr + "/deltaAngleDeg");
  return a;
}

DataBinding binding_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"path", "values", "expression", "scale"});
  DataBinding b;
  b.attribute_path = string(required(j, "path", ptr), ptr + "/path");
  b.source = source_from_json(j, ptr);
  if (auto* s = optional(j, "scale")) b.scale = scale_from_json(*s, ptr + "/scale");
  return b;
}

}  // namespace

Vec2 vec2_from_json(const Json& j, const std::string& ptr) {
  if (j.is_array()) {
    if (j.size() != 2) fail(ptr, "expected [x, y]");
    return {number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
  }
  object(j, ptr);
  only_keys(j, ptr, {"x", "y"});
  Vec2 v;
  if (auto* x = optional(j, "x")) v.x = number(*x, ptr + "/x");
  if (auto* y = optional(j, "y")) v.y = number(*y, ptr + "/y");
  return v;
}

Scalar scalar_from_json(const Json& j, const std::string& ptr) {
  if (j.is_string()) return j.get<std::string>();
  return number(j, ptr);
}

AttrValue attr_value_from_json(const Json& j, const std::string& ptr) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    Points pts;
    for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(vec2_from_json(j[i], ptr + "/" + std::to_string(i)));
    return pts;
  }
  return number(j, ptr);
}

Primitive primitive_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"kind", "attrs"});
  Primitive p;
  p.kind = enum_field(required(j, "kind", ptr), ptr + "/kind", parse_primitive_kind);
  if (auto* attrs = optional(j, "attrs")) {
    object(*attrs, ptr + "/attrs");
    for (auto it = attrs->begin(); it != attrs->end(); ++it) {
      p.attrs[it.key()] = attr_value_from_json(it.value(), ptr + "/attrs/" + it.key());
    }
  }
  return p;
}

CoordinateSystem coord_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"kind", "origin"});
  CoordinateSystem c;
  if (auto* k = optional(j, "kind")) c.kind = enum_field(*k, ptr + "/kind", parse_coord_kind);
  if (auto* o = optional(j, "origin")) c.origin = vec2_from_json(*o, ptr + "/origin");
  return c;
}

Transform transform_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"translate", "rotate", "scale"});
  Transform t;
  if (auto* v = optional(j, "translate")) t.translate = vec2_from_json(*v, ptr + "/translate");
  if (auto* r = optional(j, "rotate")) {
    const std::string rp = ptr + "/rotate";
    object(*r, rp);
    only_keys(*r, rp, {"angleDeg", "center"});
    if (auto* a = optional(*r, "angleDeg")) t.rotate.angle_deg = number(*a, rp + "/angleDeg");
    if (auto* c = optional(*r, "center")) t.rotate.center = vec2_from_json(*c, rp + "/center");
  }
  if (auto* s = optional(j, "scale")) {
    const std::string sp = ptr + "/scale";
    object(*s, sp);
    only_keys(*s, sp, {"sx", "sy"});
    if (auto* x = optional(*s, "sx")) t.scale.sx = number(*x, sp + "/sx");
    if (auto* y = optional(*s, "sy")) t.scale.sy = number(*y, sp + "/sy");
  }
  return t;
}

SpatialRelation relation_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"source", "target", "relType", "distance"});
  SpatialRelation r;
  r.source = id_field(required(j, "source", ptr), ptr + "/source");
  r.target = id_field(required(j, "target", ptr), ptr + "/target");
  r.type = enum_field(required(j, "relType", ptr), ptr + "/relType", parse_rel_type);
  if (auto* d = optional(j, "distance")) r.distance = vec2_from_json(*d, ptr + "/distance");
  return r;
}

DataSource source_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  const Json* values = optional(j, "values");
  const Json* expr = optional(j, "expression");
  if ((values != nullptr) == (expr != nullptr)) {
    fail(ptr, "exactly one of 'values' or 'expression' is required");
  }
  if (expr) return Expression{string(*expr, ptr + "/expression")};
  if (!values->is_array()) fail(ptr + "/values", "expected an array");
  ValueList list;
  for (std::size_t i = 0; i < values->size(); ++i) {
    list.values.push_back(scalar_from_json((*values)[i], ptr + "/values/" + std::to_string(i)));
  }
  return list;
}

LinearScale scale_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  only_keys(j, ptr, {"domain", "range"});
  auto pair = [&](const char* key) {
    const Json& v = required(j, key, ptr);
    const std::string p = ptr + "/" + key;
    if (!v.is_array() || v.size() != 2) fail(p, "expected [lo, hi]");
    return std::pair{number(v[0], p + "/0"), number(v[1], p + "/1")};
  };
  LinearScale s;
  std::tie(s.domain_lo, s.domain_hi) = pair("domain");
  std::tie(s.range_lo, s.range_hi) = pair("range");
  if (s.domain_lo == s.domain_hi) {
    throw Error(ErrorCode::BadScale, "scale domain must not be empty", ptr + "/domain");
  }
  return s;
}

Container container_from_json(const ContainerId& id, const Json& j, const std::string& ptr) {
  object(j, ptr);
  Container c;
  c.id = id;
  const std::string kind = string(required(j, "kind", ptr), ptr + "/kind");
  if (auto* v = optional(j, "coord")) c.coord = coord_from_json(*v, ptr + "/coord");
  if (auto* v = optional(j, "transform")) c.transform = transform_from_json(*v, ptr + "/transform");
  if (auto* v = optional(j, "bindings")) {
    if (!v->is_array()) fail(ptr + "/bindings", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.bindings.push_back(binding_from_json((*v)[i], ptr + "/bindings/" + std::to_string(i)));
    }
  }
  if (kind == "basic") {
    only_keys(j, ptr, {"kind", "coord", "transform", "bindings", "primitive"});
    c.body = BasicBody{primitive_from_json(required(j, "primitive", ptr), ptr + "/primitive")};
  } else if (kind == "repeater") {
    only_keys(j, ptr, {"kind", "coord", "transform", "bindings", "child", "count", "arrangement"});
    RepeaterBody r;
    r.child = id_field(required(j, "child", ptr), ptr + "/child");
    const auto count = integer(required(j, "count", ptr), ptr + "/count");
    if (count < 1 || count > 1000000) fail(ptr + "/count", "count must be between 1 and 1000000");
    r.count = static_cast<int>(count);
    if (auto* a = optional(j, "arrangement")) r.arrangement = arrangement_from_json(*a, ptr + "/arrangement");
    c.body = r;
  } else if (kind == "compositor") {
    only_keys(j, ptr, {"kind", "coord", "transform", "bindings", "children", "relations"});
    CompositorBody k;
    const Json& children = required(j, "children", ptr);
    if (!children.is_array()) fail(ptr + "/children", "expected an array");
    for (std::size_t i = 0; i < children.size(); ++i) {
      k.children.push_back(id_field(children[i], ptr + "/children/" + std::to_string(i)));
    }
    if (auto* rel = optional(j, "relations")) {
      if (!rel->is_array()) fail(ptr + "/relations", "expected an array");
      for (std::size_t i = 0; i < rel->size(); ++i) {
        k.relations.push_back(relation_from_json((*rel)[i], ptr + "/relations/" + std::to_string(i)));
      }
    }
    c.body = k;
  } else {
    fail(ptr + "/kind", "unknown container kind '" + kind + "'");
  }
  return c;
}

GlyphDocument document_from_json(const Json& j) {
  object(j, "");
  only_keys(j, "", {"format", "version", "rngSeed", "root", "containers"});
  GlyphDocument doc;
  if (auto* f = optional(j, "format")) {
    if (string(*f, "/format") != "gdsl") fail("/format", "expected \"gdsl\"");
  }
  if (auto* v = optional(j, "version")) {
    doc.version = integer(*v, "/version");
    if (doc.version < 0) fail("/version", "version must be >= 0");
  }
  if (auto* s = optional(j, "rngSeed")) {
    if (s->is_number_unsigned()) {
      doc.rng_seed = s->get<std::uint64_t>();
    } else {
      const auto v = integer(*s, "/rngSeed");
      if (v < 0) fail("/rngSeed", "seed must be non-negative");
      doc.rng_seed = static_cast<std::uint64_t>(v);
    }
  }
  if (auto* r = optional(j, "root"); r && !r->is_null()) doc.root = id_field(*r, "/root");
  if (auto* cs = optional(j, "containers")) {
    object(*cs, "/containers");
    for (auto it = cs->begin(); it != cs->end(); ++it) {
      const std::string ptr = "/containers/" + it.key();
      if (!is_valid_id(it.key())) fail(ptr, "'" + it.key() + "' is not a valid id");
      ContainerId id(it.key());
      doc.containers.emplace(id, container_from_json(id, it.value(), ptr));
    }
  }
  return doc;
}

std::string serialize(const GlyphDocument& doc) { return canonical_dump(to_json(doc)); }

GlyphDocument deserialize(std::string_view bytes) {
  if (bytes.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::MalformedInput, "empty input", {}, 0);
  }
  return document_from_json(parse_json(bytes));
}

GlyphDocument load_document(std::string_view bytes) {
  GlyphDocument doc = deserialize(bytes);
  const auto violations = validate_document(doc);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::InvalidDocument,
                std::string(to_string(v.kind)) + " at '" + v.container.str() + "': " + v.message,
                v.container.str());
  }
  return doc;
}

}  // namespace gdsl
