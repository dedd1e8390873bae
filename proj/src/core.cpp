#include "gdsl/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "gdsl/databind.hpp"

namespace gdsl {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::InvalidId: return "InvalidId";
    case ViolationKind::IdMismatch: return "IdMismatch";
    case ViolationKind::DanglingReference: return "DanglingReference";
    case ViolationKind::CycleDetected: return "CycleDetected";
    case ViolationKind::MultipleParents: return "MultipleParents";
    case ViolationKind::RootHasParent: return "RootHasParent";
    case ViolationKind::EmptyCompositor: return "EmptyCompositor";
    case ViolationKind::DuplicateChild: return "DuplicateChild";
    case ViolationKind::RelationOutsideChildren: return "RelationOutsideChildren";
    case ViolationKind::SelfRelation: return "SelfRelation";
    case ViolationKind::RelationCycle: return "RelationCycle";
    case ViolationKind::BadCount: return "BadCount";
    case ViolationKind::BadPrimitive: return "BadPrimitive";
    case ViolationKind::BadTransform: return "BadTransform";
    case ViolationKind::BadCoordinate: return "BadCoordinate";
    case ViolationKind::BadArrangement: return "BadArrangement";
    case ViolationKind::BadBinding: return "BadBinding";
    case ViolationKind::DuplicateBinding: return "DuplicateBinding";
  }
  return "Unknown";
}

// --- primitives -------------------------------------------------------------

const std::vector<std::string>& required_attrs(PrimitiveKind kind) {
  static const std::vector<std::string> rect{"x", "y", "width", "height"};
  static const std::vector<std::string> circle{"cx", "cy", "r"};
  static const std::vector<std::string> polygon{"points"};
  static const std::vector<std::string> line{"x1", "y1", "x2", "y2"};
  static const std::vector<std::string> path{"d"};
  static const std::vector<std::string> text{"x", "y", "content", "fontSize"};
  static const std::vector<std::string> image{"x", "y", "width", "height", "href"};
  switch (kind) {
    case PrimitiveKind::rect: return rect;
    case PrimitiveKind::circle: return circle;
    case PrimitiveKind::polygon: return polygon;
    case PrimitiveKind::line: return line;
    case PrimitiveKind::path: return path;
    case PrimitiveKind::text: return text;
    case PrimitiveKind::image: return image;
  }
  return rect;
}

const std::vector<std::string>& styling_attrs() {
  static const std::vector<std::string> names{"fill", "stroke", "strokeWidth", "opacity"};
  return names;
}

std::optional<AttrType> primitive_attr_type(PrimitiveKind kind, std::string_view name) {
  const auto& req = required_attrs(kind);
  const bool known = std::find(req.begin(), req.end(), name) != req.end() ||
                     std::find(styling_attrs().begin(), styling_attrs().end(), name) !=
                         styling_attrs().end();
  if (!known) return std::nullopt;
  if (name == "points") return AttrType::points;
  if (name == "fill" || name == "stroke") return AttrType::color;
  if (name == "d" || name == "content" || name == "href") return AttrType::string;
  return AttrType::number;
}

namespace {

bool non_negative_attr(std::string_view name) {
  return name == "width" || name == "height" || name == "r" || name == "strokeWidth" ||
         name == "fontSize";
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace

std::vector<std::string> primitive_problems(const Primitive& p) {
  std::vector<std::string> problems;
  for (const auto& name : required_attrs(p.kind)) {
    if (!p.attrs.count(name)) problems.push_back("missing attribute '" + name + "'");
  }
  for (const auto& [name, value] : p.attrs) {
    auto type = primitive_attr_type(p.kind, name);
    if (!type) {
      problems.push_back("attribute '" + name + "' is not valid on " +
                         std::string(to_string(p.kind)));
      continue;
    }
    switch (*type) {
      case AttrType::number: {
        const auto* v = std::get_if<double>(&value);
        if (!v) {
          problems.push_back("attribute '" + name + "' must be a number");
        } else if (!std::isfinite(*v)) {
          problems.push_back("attribute '" + name + "' must be finite");
        } else if (non_negative_attr(name) && *v < 0) {
          problems.push_back("attribute '" + name + "' must be >= 0");
        } else if (name == "opacity" && (*v < 0 || *v > 1)) {
          problems.push_back("attribute 'opacity' must lie in [0,1]");
        }
        break;
      }
      case AttrType::color: {
        const auto* v = std::get_if<std::string>(&value);
        if (!v || !is_valid_color(*v)) {
          problems.push_back("attribute '" + name + "' must be #RRGGBB, #RRGGBBAA or none");
        }
        break;
      }
      case AttrType::string:
        if (!std::holds_alternative<std::string>(value)) {
          problems.push_back("attribute '" + name + "' must be a string");
        }
        break;
      case AttrType::points: {
        const auto* v = std::get_if<Points>(&value);
        if (!v) {
          problems.push_back("attribute 'points' must be a list of [x,y] pairs");
        } else if (v->size() < 3) {
          problems.push_back("polygon needs at least 3 points");
        } else if (!std::all_of(v->begin(), v->end(), finite)) {
          problems.push_back("polygon points must be finite");
        }
        break;
      }
      default:
        break;
    }
  }
  return problems;
}

// --- tree structure ---------------------------------------------------------

std::map<ContainerId, ContainerId> parent_map(const GlyphDocument& doc) {
  std::map<ContainerId, ContainerId> parents;
  for (const auto& [id, c] : doc.containers) {
    for (const auto& child : children_of(c)) parents.emplace(child, id);
  }
  return parents;
}

std::vector<ContainerId> reachable_from_root(const GlyphDocument& doc) {
  std::vector<ContainerId> order;
  if (!doc.root || !doc.find(*doc.root)) return order;
  std::set<ContainerId> seen;
  std::vector<ContainerId> stack{*doc.root};
  while (!stack.empty()) {
    ContainerId id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    const Container* c = doc.find(id);
    if (!c) continue;
    order.push_back(id);
    auto kids = children_of(*c);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<ContainerId> unattached(const GlyphDocument& doc) {
  auto parents = parent_map(doc);
  std::vector<ContainerId> out;
  for (const auto& [id, c] : doc.containers) {
    if (doc.root && *doc.root == id) continue;
    if (!parents.count(id)) out.push_back(id);
  }
  return out;
}

bool has_relation_cycle(const std::vector<ContainerId>& members,
                        const std::vector<SpatialRelation>& relations) {
  // Edge target -> source: a source is placed after its target.
  std::map<ContainerId, int> indegree;
  std::map<ContainerId, std::vector<ContainerId>> out;
  for (const auto& m : members) indegree[m] = 0;
  for (const auto& r : relations) {
    if (!indegree.count(r.source) || !indegree.count(r.target)) continue;
    out[r.target].push_back(r.source);
    indegree[r.source]++;
  }
  std::vector<ContainerId> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    ContainerId id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& next : out[id]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return visited != indegree.size();
}

bool is_ancestor_or_self(const GlyphDocument& doc, const ContainerId& ancestor,
                         const ContainerId& id) {
  std::set<ContainerId> seen;
  std::vector<ContainerId> stack{ancestor};
  while (!stack.empty()) {
    ContainerId cur = stack.back();
    stack.pop_back();
    if (cur == id) return true;
    if (!seen.insert(cur).second) continue;
    if (const Container* c = doc.find(cur)) {
      for (const auto& k : children_of(*c)) stack.push_back(k);
    }
  }
  return false;
}

namespace {

void find_cycles(const GlyphDocument& doc, std::vector<Violation>& out,
                 std::set<ContainerId>& in_cycle) {
  enum class Mark { none, active, done };
  std::map<ContainerId, Mark> mark;
  std::vector<ContainerId> stack;
  std::set<ContainerId> reported;

  std::function<void(const ContainerId&)> visit = [&](const ContainerId& id) {
    mark[id] = Mark::active;
    stack.push_back(id);
    const Container& c = doc.containers.at(id);
    for (const auto& child : children_of(c)) {
      if (!doc.find(child)) continue;
      Mark m = mark.count(child) ? mark[child] : Mark::none;
      if (m == Mark::none) {
        visit(child);
      } else if (m == Mark::active) {
        auto start = std::find(stack.begin(), stack.end(), child);
        std::vector<ContainerId> cycle(start, stack.end());
        ContainerId smallest = *std::min_element(cycle.begin(), cycle.end());
        in_cycle.insert(cycle.begin(), cycle.end());
        if (reported.insert(smallest).second) {
          std::string members;
          for (const auto& m2 : cycle) members += (members.empty() ? "" : " -> ") + m2.str();
          out.push_back({smallest, ViolationKind::CycleDetected,
                         "containment cycle: " + members + " -> " + child.str()});
        }
      }
    }
    stack.pop_back();
    mark[id] = Mark::done;
  };

  for (const auto& [id, c] : doc.containers) {
    if (!mark.count(id)) visit(id);
  }
}

void check_binding(const GlyphDocument& doc, const Container& c, const DataBinding& b,
                   std::vector<Violation>& out) {
  try {
    resolve_attribute_path(doc, c, b.attribute_path);
  } catch (const Error& e) {
    out.push_back({c.id, ViolationKind::BadBinding,
                   "binding '" + b.attribute_path + "': " + e.detail()});
    return;
  }
  if (const auto* list = std::get_if<ValueList>(&b.source)) {
    if (list->values.empty()) {
      out.push_back({c.id, ViolationKind::BadBinding,
                     "binding '" + b.attribute_path + "' has no values"});
    }
  } else {
    try {
      parse_expression(std::get<Expression>(b.source).text);
    } catch (const Error& e) {
      out.push_back({c.id, ViolationKind::BadBinding,
                     "binding '" + b.attribute_path + "': " + e.detail()});
    }
  }
  if (b.scale && (b.scale->domain_lo == b.scale->domain_hi ||
                  !std::isfinite(b.scale->domain_lo) || !std::isfinite(b.scale->domain_hi) ||
                  !std::isfinite(b.scale->range_lo) || !std::isfinite(b.scale->range_hi))) {
    out.push_back({c.id, ViolationKind::BadBinding,
                   "binding '" + b.attribute_path + "' has a degenerate scale domain"});
  }
}

}  // namespace

std::vector<Violation> validate_document(const GlyphDocument& doc) {
  std::vector<Violation> out;

  if (doc.root && !doc.find(*doc.root)) {
    out.push_back({*doc.root, ViolationKind::DanglingReference,
                   "root '" + doc.root->str() + "' does not exist"});
  }
  if (!doc.root && !doc.containers.empty()) {
    out.push_back({doc.containers.begin()->first, ViolationKind::DanglingReference,
                   "document has containers but no root"});
  }

  std::map<ContainerId, int> parent_count;
  for (const auto& [id, c] : doc.containers) {
    if (!is_valid_id(id.str())) {
      out.push_back({id, ViolationKind::InvalidId, "id '" + id.str() + "' is not a valid id"});
    }
    if (c.id != id) {
      out.push_back({id, ViolationKind::IdMismatch,
                     "container registered as '" + id.str() + "' carries id '" + c.id.str() + "'"});
    }
    const auto& t = c.transform;
    if (!finite(t.translate) || !finite(t.rotate.center) || !std::isfinite(t.rotate.angle_deg) ||
        !std::isfinite(t.scale.sx) || !std::isfinite(t.scale.sy)) {
      out.push_back({id, ViolationKind::BadTransform, "transform has non-finite values"});
    } else if (t.scale.sx == 0 || t.scale.sy == 0) {
      out.push_back({id, ViolationKind::BadTransform, "scale factors must be non-zero"});
    }
    if (!finite(c.coord.origin)) {
      out.push_back({id, ViolationKind::BadCoordinate, "origin must be finite"});
    }

    if (const auto* b = std::get_if<BasicBody>(&c.body)) {
      for (const auto& problem : primitive_problems(b->primitive)) {
        out.push_back({id, ViolationKind::BadPrimitive, problem});
      }
    } else if (const auto* r = std::get_if<RepeaterBody>(&c.body)) {
      if (r->count < 1) out.push_back({id, ViolationKind::BadCount, "repeat count must be >= 1"});
      if (!doc.find(r->child)) {
        out.push_back({id, ViolationKind::DanglingReference,
                       "child '" + r->child.str() + "' does not exist"});
      } else {
        parent_count[r->child]++;
      }
      const auto& a = r->arrangement;
      if (!finite(a.step) || !std::isfinite(a.radius) || !std::isfinite(a.start_angle_deg) ||
          !std::isfinite(a.delta_angle_deg) || !std::isfinite(a.gap)) {
        out.push_back({id, ViolationKind::BadArrangement, "arrangement has non-finite values"});
      }
      if (a.radius < 0) {
        out.push_back({id, ViolationKind::BadArrangement, "polar radius must be >= 0"});
      }
      if (c.coord.kind == CoordKind::polar && a.mode == ArrangementMode::stacked) {
        out.push_back({id, ViolationKind::BadArrangement,
                       "stacked arrangement is only supported in cartesian coordinates"});
      }
      const bool polar_fields = a.radius != 0 || a.start_angle_deg != 0 || a.delta_angle_deg != 0;
      const bool cartesian_fields = a.step != Vec2{} || a.gap != 0 || a.axis != Axis::x;
      if ((c.coord.kind == CoordKind::cartesian && polar_fields) ||
          (c.coord.kind == CoordKind::polar && cartesian_fields)) {
        out.push_back({id, ViolationKind::BadArrangement,
                       "arrangement parameters do not match the coordinate kind"});
      }
    } else {
      const auto& k = std::get<CompositorBody>(c.body);
      if (k.children.empty()) {
        out.push_back({id, ViolationKind::EmptyCompositor, "compositor has no children"});
      }
      std::set<ContainerId> members;
      for (const auto& child : k.children) {
        if (!members.insert(child).second) {
          out.push_back({id, ViolationKind::DuplicateChild,
                         "child '" + child.str() + "' listed twice"});
          continue;
        }
        if (!doc.find(child)) {
          out.push_back({id, ViolationKind::DanglingReference,
                         "child '" + child.str() + "' does not exist"});
        } else {
          parent_count[child]++;
        }
      }
      for (const auto& rel : k.relations) {
        if (rel.source == rel.target) {
          out.push_back({id, ViolationKind::SelfRelation,
                         "relation source and target are both '" + rel.source.str() + "'"});
        }
        if (!members.count(rel.source) || !members.count(rel.target)) {
          out.push_back({id, ViolationKind::RelationOutsideChildren,
                         "relation " + rel.source.str() + " -> " + rel.target.str() +
                             " references a non-child"});
        }
        if (!finite(rel.distance)) {
          out.push_back({id, ViolationKind::RelationOutsideChildren,
                         "relation distance must be finite"});
        }
      }
      if (has_relation_cycle(k.children, k.relations)) {
        out.push_back({id, ViolationKind::RelationCycle, "spatial relations form a cycle"});
      }
    }

    std::set<std::string> paths;
    for (const auto& b : c.bindings) {
      if (!paths.insert(b.attribute_path).second) {
        out.push_back({id, ViolationKind::DuplicateBinding,
                       "attribute '" + b.attribute_path + "' bound twice"});
      }
      check_binding(doc, c, b, out);
    }
  }

  for (const auto& [child, n] : parent_count) {
    if (n > 1) {
      out.push_back({child, ViolationKind::MultipleParents,
                     "'" + child.str() + "' has " + std::to_string(n) + " parents"});
    }
  }

  std::set<ContainerId> in_cycle;
  find_cycles(doc, out, in_cycle);

  if (doc.root && parent_count.count(*doc.root) && !in_cycle.count(*doc.root)) {
    out.push_back({*doc.root, ViolationKind::RootHasParent, "the root is another container's child"});
  }
  return out;
}

std::vector<std::string> document_warnings(const GlyphDocument& doc) {
  std::vector<std::string> out;
  for (const auto& id : unattached(doc)) {
    out.push_back("container '" + id.str() + "' is not attached to the root");
  }
  return out;
}

// --- attribute paths --------------------------------------------------------

namespace {

[[noreturn]] void unknown_path(std::string_view path, const std::string& why) {
  throw Error(ErrorCode::UnknownPath, "'" + std::string(path) + "': " + why, std::string(path));
}

[[noreturn]] void kind_mismatch(std::string_view path, const std::string& why) {
  throw Error(ErrorCode::PathKindMismatch, "'" + std::string(path) + "': " + why,
              std::string(path));
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Container-scope fields shared by every kind.
std::optional<AttrType> common_field_type(std::string_view f) {
  static const std::set<std::string, std::less<>> numeric = {
      "transform.translate.x",     "transform.translate.y",     "transform.rotate.angleDeg",
      "transform.rotate.center.x", "transform.rotate.center.y", "transform.scale.sx",
      "transform.scale.sy",        "coord.origin.x",            "coord.origin.y"};
  if (numeric.count(f)) return AttrType::number;
  return std::nullopt;
}

AttrType field_type(const Container& c, std::string_view field, std::string_view full_path) {
  if (auto t = common_field_type(field)) return *t;
  if (starts_with(field, "primitive.")) {
    const auto* b = std::get_if<BasicBody>(&c.body);
    if (!b) kind_mismatch(full_path, "primitive attributes exist only on basic containers");
    std::string name(field.substr(10));
    auto t = primitive_attr_type(b->primitive.kind, name);
    if (!t) {
      unknown_path(full_path, std::string(to_string(b->primitive.kind)) + " has no attribute '" +
                                  name + "'");
    }
    return *t;
  }
  if (field == "body.count" || starts_with(field, "arrangement.")) {
    if (!c.is_repeater()) kind_mismatch(full_path, "only repeaters have repetition parameters");
    if (field == "body.count") return AttrType::count;
    if (field == "arrangement.mode") return AttrType::mode;
    const bool polar = c.coord.kind == CoordKind::polar;
    if (field == "arrangement.step.x" || field == "arrangement.step.y" ||
        field == "arrangement.gap") {
      if (polar) kind_mismatch(full_path, "cartesian parameter on a polar repeater");
      return AttrType::number;
    }
    if (field == "arrangement.axis") {
      if (polar) kind_mismatch(full_path, "cartesian parameter on a polar repeater");
      return AttrType::axis;
    }
    if (field == "arrangement.radius" || field == "arrangement.startAngleDeg" ||
        field == "arrangement.deltaAngleDeg") {
      if (!polar) kind_mismatch(full_path, "polar parameter on a cartesian repeater");
      return AttrType::number;
    }
  }
  unknown_path(full_path, "no such field on a " + std::string(kind_name(c)) + " container");
}

const std::set<std::string, std::less<>>& placement_fields() {
  static const std::set<std::string, std::less<>> fields = {
      "translate.x", "translate.y", "rotate.angleDeg", "scale.sx", "scale.sy", "scale.sx+sy"};
  return fields;
}

struct InstancePath {
  std::optional<std::string> descendant;  // from instance[<id>]
  std::string rest;                       // after "instance." or "instance[..]."
};

std::optional<InstancePath> split_instance_path(std::string_view path) {
  if (starts_with(path, "instance.")) return InstancePath{std::nullopt, std::string(path.substr(9))};
  if (starts_with(path, "instance[")) {
    auto close = path.find("].", 9);
    if (close == std::string_view::npos) unknown_path(path, "expected instance[<id>].<field>");
    return InstancePath{std::string(path.substr(9, close - 9)), std::string(path.substr(close + 2))};
  }
  return std::nullopt;
}

AttributeSlot resolve_impl(const GlyphDocument* doc, const Container& c, std::string_view path) {
  AttributeSlot slot;
  slot.path = std::string(path);
  auto inst = split_instance_path(path);
  if (!inst) {
    if (path == "instance") unknown_path(path, "incomplete instance path");
    slot.scope = AttributeSlot::Scope::container;
    slot.field = std::string(path);
    slot.type = field_type(c, path, path);
    return slot;
  }
  const auto* rep = std::get_if<RepeaterBody>(&c.body);
  if (!rep) kind_mismatch(path, "instance paths are only valid on repeater containers");

  if (!inst->descendant) {
    if (placement_fields().count(inst->rest)) {
      slot.scope = AttributeSlot::Scope::instance_placement;
      slot.field = inst->rest;
      slot.type = AttrType::number;
      return slot;
    }
    if (!starts_with(inst->rest, "primitive.")) {
      unknown_path(path, "expected translate.*, rotate.angleDeg, scale.* or primitive.*");
    }
    slot.scope = AttributeSlot::Scope::instance_descendant;
    slot.descendant = rep->child;
    slot.field = inst->rest;
    if (doc) {
      const Container* child = doc->find(rep->child);
      if (!child) unknown_path(path, "repeater child '" + rep->child.str() + "' does not exist");
      slot.type = field_type(*child, inst->rest, path);
    } else {
      std::string name = inst->rest.substr(10);
      std::optional<AttrType> t;
      for (auto k : {PrimitiveKind::rect, PrimitiveKind::circle, PrimitiveKind::polygon,
                     PrimitiveKind::line, PrimitiveKind::path, PrimitiveKind::text,
                     PrimitiveKind::image}) {
        if ((t = primitive_attr_type(k, name))) break;
      }
      if (!t) unknown_path(path, "no primitive has attribute '" + name + "'");
      slot.type = *t;
    }
    return slot;
  }

  if (!is_valid_id(*inst->descendant)) unknown_path(path, "invalid descendant id");
  if (split_instance_path(inst->rest)) unknown_path(path, "nested instance paths are not allowed");
  slot.scope = AttributeSlot::Scope::instance_descendant;
  slot.descendant = ContainerId(*inst->descendant);
  slot.field = inst->rest;
  if (doc) {
    const Container* target = doc->find(*slot.descendant);
    if (!target) unknown_path(path, "container '" + *inst->descendant + "' does not exist");
    if (!is_ancestor_or_self(*doc, rep->child, *slot.descendant)) {
      unknown_path(path, "'" + *inst->descendant + "' is not inside repeater '" + c.id.str() + "'");
    }
    slot.type = field_type(*target, inst->rest, path);
  } else {
    if (auto t = common_field_type(inst->rest)) {
      slot.type = *t;
    } else if (inst->rest == "body.count") {
      slot.type = AttrType::count;
    } else {
      slot.type = AttrType::number;
    }
  }
  return slot;
}

double expect_number(const AttrValue& v, std::string_view field) {
  const auto* d = std::get_if<double>(&v);
  if (!d) {
    throw Error(ErrorCode::TypeMismatch, "'" + std::string(field) + "' expects a number",
                std::string(field));
  }
  if (!std::isfinite(*d)) {
    throw Error(ErrorCode::BadValue, "'" + std::string(field) + "' must be finite",
                std::string(field));
  }
  return *d;
}

const std::string& expect_string(const AttrValue& v, std::string_view field,
                                 const std::string& what) {
  const auto* s = std::get_if<std::string>(&v);
  if (!s) {
    throw Error(ErrorCode::TypeMismatch, "'" + std::string(field) + "' expects " + what,
                std::string(field));
  }
  return *s;
}

double* number_field(Container& c, std::string_view f) {
  auto& t = c.transform;
  if (f == "transform.translate.x") return &t.translate.x;
  if (f == "transform.translate.y") return &t.translate.y;
  if (f == "transform.rotate.angleDeg") return &t.rotate.angle_deg;
  if (f == "transform.rotate.center.x") return &t.rotate.center.x;
  if (f == "transform.rotate.center.y") return &t.rotate.center.y;
  if (f == "transform.scale.sx") return &t.scale.sx;
  if (f == "transform.scale.sy") return &t.scale.sy;
  if (f == "coord.origin.x") return &c.coord.origin.x;
  if (f == "coord.origin.y") return &c.coord.origin.y;
  if (auto* r = std::get_if<RepeaterBody>(&c.body)) {
    auto& a = r->arrangement;
    if (f == "arrangement.step.x") return &a.step.x;
    if (f == "arrangement.step.y") return &a.step.y;
    if (f == "arrangement.gap") return &a.gap;
    if (f == "arrangement.radius") return &a.radius;
    if (f == "arrangement.startAngleDeg") return &a.start_angle_deg;
    if (f == "arrangement.deltaAngleDeg") return &a.delta_angle_deg;
  }
  return nullptr;
}

}  // namespace

AttributeSlot resolve_attribute_path(const Container& c, std::string_view path) {
  return resolve_impl(nullptr, c, path);
}

AttributeSlot resolve_attribute_path(const GlyphDocument& doc, const Container& c,
                                     std::string_view path) {
  return resolve_impl(&doc, c, path);
}

AttrValue read_attribute(const Container& c, std::string_view field) {
  AttrType type = field_type(c, field, field);
  if (std::string_view(field).substr(0, 10) == "primitive.") {
    const auto& prim = std::get<BasicBody>(c.body).primitive;
    auto it = prim.attrs.find(std::string(field.substr(10)));
    if (it == prim.attrs.end()) {
      if (type == AttrType::color) return std::string("none");
      if (field == "primitive.opacity") return 1.0;
      return 0.0;
    }
    return it->second;
  }
  if (field == "body.count") return static_cast<double>(std::get<RepeaterBody>(c.body).count);
  if (field == "arrangement.mode") {
    return std::string(to_string(std::get<RepeaterBody>(c.body).arrangement.mode));
  }
  if (field == "arrangement.axis") {
    return std::string(to_string(std::get<RepeaterBody>(c.body).arrangement.axis));
  }
  Container& mutable_c = const_cast<Container&>(c);
  if (double* d = number_field(mutable_c, field)) return *d;
  unknown_path(field, "unreadable field");
}

void write_attribute(Container& c, std::string_view field, const AttrValue& value) {
  const AttrType type = field_type(c, field, field);
  const std::string f(field);
  if (f.rfind("primitive.", 0) == 0) {
    auto& prim = std::get<BasicBody>(c.body).primitive;
    const std::string name = f.substr(10);
    AttrValue stored = value;
    switch (type) {
      case AttrType::number: expect_number(value, field); break;
      case AttrType::string: expect_string(value, field, "a string"); break;
      case AttrType::color: {
        const auto& s = expect_string(value, field, "a color string");
        if (!is_valid_color(s)) {
          throw Error(ErrorCode::TypeMismatch,
                      "'" + s + "' is not a color (#RRGGBB, #RRGGBBAA or none)", f);
        }
        break;
      }
      case AttrType::points:
        if (!std::holds_alternative<Points>(value)) {
          throw Error(ErrorCode::TypeMismatch, "'" + f + "' expects a list of points", f);
        }
        break;
      default: break;
    }
    Primitive candidate = prim;
    candidate.attrs[name] = stored;
    auto problems = primitive_problems(candidate);
    if (!problems.empty()) throw Error(ErrorCode::BadValue, problems.front(), f);
    prim = std::move(candidate);
    return;
  }
  if (type == AttrType::count) {
    double d = expect_number(value, field);
    if (d != std::floor(d)) throw Error(ErrorCode::TypeMismatch, "repeat count must be an integer", f);
    if (d < 1 || d > 1e6) throw Error(ErrorCode::BadValue, "repeat count must be in [1, 1000000]", f);
    std::get<RepeaterBody>(c.body).count = static_cast<int>(d);
    return;
  }
  if (type == AttrType::mode) {
    auto m = parse_arrangement_mode(expect_string(value, field, "an arrangement mode"));
    if (!m) throw Error(ErrorCode::TypeMismatch, "unknown arrangement mode", f);
    if (*m == ArrangementMode::stacked && c.coord.kind == CoordKind::polar) {
      throw Error(ErrorCode::UnsupportedArrangement,
                  "stacked arrangement is only supported in cartesian coordinates", f);
    }
    std::get<RepeaterBody>(c.body).arrangement.mode = *m;
    return;
  }
  if (type == AttrType::axis) {
    auto a = parse_axis(expect_string(value, field, "'x' or 'y'"));
    if (!a) throw Error(ErrorCode::TypeMismatch, "axis must be 'x' or 'y'", f);
    std::get<RepeaterBody>(c.body).arrangement.axis = *a;
    return;
  }
  double d = expect_number(value, field);
  if ((f == "transform.scale.sx" || f == "transform.scale.sy") && d == 0) {
    throw Error(ErrorCode::DegenerateScale, "scale factors must be non-zero", f);
  }
  if (f == "arrangement.radius" && d < 0) {
    throw Error(ErrorCode::BadValue, "polar radius must be >= 0", f);
  }
  double* slot = number_field(c, field);
  if (!slot) unknown_path(field, "unwritable field");
  *slot = d;
}

}  // namespace gdsl
