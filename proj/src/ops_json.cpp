#include "gdsl/error.hpp"
#include "gdsl/ops.hpp"

namespace gdsl {

using namespace json_read;

namespace {

Json arrangement_spec_json(const ArrangementSpec& s) {
  Json j = Json::object();
  if (s.mode) j["mode"] = std::string(to_string(*s.mode));
  if (s.step) j["step"] = to_json(*s.step);
  if (s.radius) j["radius"] = canonical_number(*s.radius);
  if (s.start_angle_deg) j["startAngleDeg"] = canonical_number(*s.start_angle_deg);
  if (s.delta_angle_deg) j["deltaAngleDeg"] = canonical_number(*s.delta_angle_deg);
  if (s.axis) j["axis"] = std::string(to_string(*s.axis));
  if (s.gap) j["gap"] = canonical_number(*s.gap);
  return j;
}

ArrangementSpec arrangement_spec_from_json(const Json& j, const std::string& ptr) {
  ArrangementSpec s;
  auto mode = [&](const Json& v, const std::string& p) {
    const std::string name = string(v, p);
    auto m = parse_arrangement_mode(name);
    if (!m) fail(p, "unknown arrangement mode '" + name + "'");
    return *m;
  };
  // Table-style shorthand: "arrangement": "uniform".
  if (j.is_string()) {
    s.mode = mode(j, ptr);
    return s;
  }
  object(j, ptr);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const std::string p = ptr + "/" + k;
    if (k == "mode") s.mode = mode(*it, p);
    else if (k == "step") s.step = vec2_from_json(*it, p);
    else if (k == "radius") s.radius = number(*it, p);
    else if (k == "startAngleDeg") s.start_angle_deg = number(*it, p);
    else if (k == "deltaAngleDeg") s.delta_angle_deg = number(*it, p);
    else if (k == "gap") s.gap = number(*it, p);
    else if (k == "axis") {
      auto a = parse_axis(string(*it, p));
      if (!a) fail(p, "axis must be \"x\" or \"y\"");
      s.axis = *a;
    } else {
      fail(p, "unknown field");
    }
  }
  return s;
}

ContainerId id_at(const Json& obj, const char* key, const std::string& ptr) {
  return ContainerId(string(required(obj, key, ptr), ptr + "/" + key));
}

void only(const Json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(ptr + "/" + it.key(), "unknown field");
  }
}

}  // namespace

Json to_json(const Operation& op) {
  Json j = {{"op", std::string(op_name(op))}};
  if (const auto* o = std::get_if<CreateBasic>(&op)) {
    j["id"] = o->id.str();
    j["kind"] = std::string(to_string(o->kind));
    Json params = Json::object();
    for (const auto& [k, v] : o->params) params[k] = to_json(v);
    j["params"] = params;
    j["coord"] = to_json(o->coord);
    j["transform"] = to_json(o->transform);
  } else if (const auto* o = std::get_if<CreateRepeater>(&op)) {
    j["id"] = o->id.str();
    j["target"] = o->target.str();
    j["coordKind"] = std::string(to_string(o->coord_kind));
    j["count"] = o->count;
    j["arrangement"] = arrangement_spec_json(o->arrangement);
  } else if (const auto* o = std::get_if<CreateCompositor>(&op)) {
    j["id"] = o->id.str();
    Json children = Json::array();
    for (const auto& c : o->children) children.push_back(c.str());
    Json relations = Json::array();
    for (const auto& r : o->relations) relations.push_back(to_json(r));
    j["children"] = children;
    j["relations"] = relations;
  } else if (const auto* o = std::get_if<ModifyParams>(&op)) {
    j["target"] = o->target.str();
    Json params = Json::object();
    for (const auto& [k, v] : o->params) params[k] = to_json(v);
    j["params"] = params;
  } else if (const auto* o = std::get_if<EncodeData>(&op)) {
    j.update(to_json(o->data));
    j["target"] = o->target.str();
    j["path"] = o->path;
    if (o->scale) j["scale"] = to_json(*o->scale);
  }
  return j;
}

Operation operation_from_json(const Json& j, const std::string& ptr) {
  object(j, ptr);
  const std::string name = string(required(j, "op", ptr), ptr + "/op");
  if (name == "CreateBasic") {
    only(j, ptr, {"op", "id", "kind", "params", "coord", "transform"});
    CreateBasic o;
    o.id = id_at(j, "id", ptr);
    const std::string kind = string(required(j, "kind", ptr), ptr + "/kind");
    auto k = parse_primitive_kind(kind);
    if (!k) fail(ptr + "/kind", "unknown primitive kind '" + kind + "'");
    o.kind = *k;
    if (auto* p = optional(j, "params")) {
      object(*p, ptr + "/params");
      for (auto it = p->begin(); it != p->end(); ++it) {
        o.params[it.key()] = attr_value_from_json(*it, ptr + "/params/" + it.key());
      }
    }
    if (auto* c = optional(j, "coord")) o.coord = coord_from_json(*c, ptr + "/coord");
    if (auto* t = optional(j, "transform")) o.transform = transform_from_json(*t, ptr + "/transform");
    return o;
  }
  if (name == "CreateRepeater") {
    only(j, ptr, {"op", "id", "target", "coordKind", "count", "arrangement"});
    CreateRepeater o;
    o.id = id_at(j, "id", ptr);
    o.target = id_at(j, "target", ptr);
    if (auto* k = optional(j, "coordKind")) {
      const std::string s = string(*k, ptr + "/coordKind");
      auto kind = parse_coord_kind(s);
      if (!kind) fail(ptr + "/coordKind", "expected \"cartesian\" or \"polar\"");
      o.coord_kind = *kind;
    }
    const auto count = integer(required(j, "count", ptr), ptr + "/count");
    if (count < 1 || count > 1000000) fail(ptr + "/count", "count must be between 1 and 1000000");
    o.count = static_cast<int>(count);
    if (auto* a = optional(j, "arrangement")) o.arrangement = arrangement_spec_from_json(*a, ptr + "/arrangement");
    return o;
  }
  if (name == "CreateCompositor") {
    only(j, ptr, {"op", "id", "children", "relations"});
    CreateCompositor o;
    o.id = id_at(j, "id", ptr);
    const Json& children = required(j, "children", ptr);
    if (!children.is_array()) fail(ptr + "/children", "expected an array");
    for (std::size_t i = 0; i < children.size(); ++i) {
      o.children.emplace_back(string(children[i], ptr + "/children/" + std::to_string(i)));
    }
    if (auto* rel = optional(j, "relations")) {
      if (!rel->is_array()) fail(ptr + "/relations", "expected an array");
      for (std::size_t i = 0; i < rel->size(); ++i) {
        o.relations.push_back(relation_from_json((*rel)[i], ptr + "/relations/" + std::to_string(i)));
      }
    }
    return o;
  }
  if (name == "ModifyParams") {
    only(j, ptr, {"op", "target", "params"});
    ModifyParams o;
    o.target = id_at(j, "target", ptr);
    const Json& p = required(j, "params", ptr);
    object(p, ptr + "/params");
    for (auto it = p.begin(); it != p.end(); ++it) {
      o.params[it.key()] = attr_value_from_json(*it, ptr + "/params/" + it.key());
    }
    return o;
  }
  if (name == "EncodeData") {
    only(j, ptr, {"op", "target", "path", "values", "expression", "scale"});
    EncodeData o;
    o.target = id_at(j, "target", ptr);
    o.path = string(required(j, "path", ptr), ptr + "/path");
    o.data = source_from_json(j, ptr);
    if (auto* s = optional(j, "scale")) o.scale = scale_from_json(*s, ptr + "/scale");
    return o;
  }
  fail(ptr + "/op", "unknown operation '" + name + "'");
}

std::vector<Operation> operations_from_json(const Json& j) {
  if (!j.is_array()) fail("", "expected an array of operations");
  std::vector<Operation> ops;
  for (std::size_t i = 0; i < j.size(); ++i) ops.push_back(operation_from_json(j[i], "/" + std::to_string(i)));
  return ops;
}

Json to_json(const EditHistory& h) {
  Json entries = Json::array();
  for (const auto& e : h.entries) {
    entries.push_back({{"op", to_json(e.op)}, {"versionBefore", e.version_before}, {"versionAfter", e.version_after}});
  }
  return {{"entries", entries}};
}

EditHistory history_from_json(const Json& j) {
  object(j, "");
  EditHistory h;
  const Json& entries = required(j, "entries", "");
  if (!entries.is_array()) fail("/entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = "/entries/" + std::to_string(i);
    object(entries[i], p);
    HistoryEntry e{operation_from_json(required(entries[i], "op", p), p + "/op"),
                   integer(required(entries[i], "versionBefore", p), p + "/versionBefore"),
                   integer(required(entries[i], "versionAfter", p), p + "/versionAfter")};
    h.entries.push_back(std::move(e));
  }
  return h;
}

}  // namespace gdsl
