#include "gdsl/ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gdsl/core.hpp"
#include "gdsl/databind.hpp"
#include "gdsl/error.hpp"
#include "gdsl/layout.hpp"

namespace gdsl {

namespace {

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

void check_new_id(const GlyphDocument& doc, const ContainerId& id) {
  if (!is_valid_id(id.str())) {
    throw Error(ErrorCode::BadValue, "'" + id.str() + "' is not a valid id ([A-Za-z0-9_ -]+)", "id");
  }
  if (doc.find(id)) throw Error(ErrorCode::DuplicateId, "id '" + id.str() + "' is already in use", "id");
}

Container& existing(GlyphDocument& doc, const ContainerId& id, ErrorCode code, const char* field) {
  Container* c = doc.find(id);
  if (!c) throw Error(code, "no container with id '" + id.str() + "'", field);
  return *c;
}

void check_transform(const Transform& t, const CoordinateSystem& coord) {
  if (!finite(t.translate) || !finite(t.rotate.center) || !std::isfinite(t.rotate.angle_deg) ||
      !std::isfinite(t.scale.sx) || !std::isfinite(t.scale.sy)) {
    throw Error(ErrorCode::BadValue, "transform values must be finite", "transform");
  }
  if (t.scale.sx == 0 || t.scale.sy == 0) {
    throw Error(ErrorCode::DegenerateScale, "scale factors must be non-zero", "transform.scale");
  }
  if (!finite(coord.origin)) throw Error(ErrorCode::BadValue, "origin must be finite", "coord.origin");
}

// Where a container hangs in the tree.
struct Attachment {
  enum class Kind { none, root, parent } kind = Kind::none;
  ContainerId parent;
};

Attachment attachment_of(const GlyphDocument& doc, const std::map<ContainerId, ContainerId>& parents,
                         const ContainerId& id) {
  if (doc.root && *doc.root == id) return {Attachment::Kind::root, {}};
  auto it = parents.find(id);
  if (it != parents.end()) return {Attachment::Kind::parent, it->second};
  return {};
}

void dedupe_relations(std::vector<SpatialRelation>& rels) {
  std::vector<SpatialRelation> out;
  for (auto& r : rels) {
    if (r.source == r.target) continue;
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  }
  rels = std::move(out);
}

GlyphDocument create_basic(const GlyphDocument& doc, const CreateBasic& op) {
  check_new_id(doc, op.id);
  Primitive p{op.kind, op.params};
  const auto problems = primitive_problems(p);
  if (!problems.empty()) throw Error(ErrorCode::BadPrimitiveParams, problems.front(), "params");
  check_transform(op.transform, op.coord);

  GlyphDocument out = doc;
  Container c;
  c.id = op.id;
  c.body = BasicBody{std::move(p)};
  c.coord = op.coord;
  c.transform = op.transform;
  const bool first = out.containers.empty();
  out.containers.emplace(op.id, std::move(c));
  if (first) out.root = op.id;
  return out;
}

Arrangement resolve_arrangement(const GlyphDocument& doc, const CreateRepeater& op) {
  const ArrangementSpec& s = op.arrangement;
  Arrangement a;
  a.mode = s.mode.value_or(ArrangementMode::uniform);
  const bool polar = op.coord_kind == CoordKind::polar;
  if (polar) {
    if (a.mode == ArrangementMode::stacked) {
      throw Error(ErrorCode::UnsupportedArrangement,
                  "stacked arrangement is only supported in cartesian coordinates", "arrangement.mode");
    }
    const char* stray = s.step ? "arrangement.step" : s.axis ? "arrangement.axis" : s.gap ? "arrangement.gap" : nullptr;
    if (stray) throw Error(ErrorCode::PathKindMismatch, "cartesian parameter on a polar repeater", stray);
    a.radius = s.radius.value_or(0.0);
    a.start_angle_deg = s.start_angle_deg.value_or(0.0);
    if (a.mode == ArrangementMode::uniform) {
      a.delta_angle_deg = s.delta_angle_deg.value_or(360.0 / op.count);
    } else {
      a.delta_angle_deg = s.delta_angle_deg.value_or(0.0);
    }
    if (!std::isfinite(a.radius) || a.radius < 0) {
      throw Error(ErrorCode::BadValue, "polar radius must be finite and >= 0", "arrangement.radius");
    }
    if (!std::isfinite(a.start_angle_deg) || !std::isfinite(a.delta_angle_deg)) {
      throw Error(ErrorCode::BadValue, "angles must be finite", "arrangement");
    }
    return a;
  }

  const char* stray = s.radius ? "arrangement.radius"
                      : s.start_angle_deg ? "arrangement.startAngleDeg"
                      : s.delta_angle_deg ? "arrangement.deltaAngleDeg"
                                          : nullptr;
  if (stray) throw Error(ErrorCode::PathKindMismatch, "polar parameter on a cartesian repeater", stray);
  a.axis = s.axis.value_or(Axis::x);
  a.gap = s.gap.value_or(0.0);
  if (s.step) {
    a.step = *s.step;
  } else if (a.mode == ArrangementMode::uniform) {
    // Default step: side by side, one bound width apart.
    const BBox b = container_bbox(doc, op.target);
    a.step = {b.valid ? b.width() : 0.0, 0.0};
  }
  if (!finite(a.step) || !std::isfinite(a.gap)) {
    throw Error(ErrorCode::BadValue, "arrangement values must be finite", "arrangement");
  }
  return a;
}

GlyphDocument create_repeater(const GlyphDocument& doc, const CreateRepeater& op) {
  if (op.id == op.target) {
    throw Error(ErrorCode::WouldCreateCycle, "a repeater cannot repeat itself", "target");
  }
  check_new_id(doc, op.id);
  if (!doc.find(op.target)) {
    throw Error(ErrorCode::UnknownTarget, "no container with id '" + op.target.str() + "'", "target");
  }
  if (op.count < 1) throw Error(ErrorCode::BadValue, "count must be >= 1", "count");

  Container c;
  c.id = op.id;
  c.coord.kind = op.coord_kind;
  c.body = RepeaterBody{op.target, op.count, resolve_arrangement(doc, op)};

  GlyphDocument out = doc;
  const auto parents = parent_map(doc);
  const Attachment at = attachment_of(doc, parents, op.target);
  if (at.kind == Attachment::Kind::root) {
    out.root = op.id;
  } else if (at.kind == Attachment::Kind::parent) {
    Container& parent = out.containers.at(at.parent);
    if (auto* r = std::get_if<RepeaterBody>(&parent.body)) {
      r->child = op.id;
    } else if (auto* k = std::get_if<CompositorBody>(&parent.body)) {
      std::replace(k->children.begin(), k->children.end(), op.target, op.id);
      for (auto& rel : k->relations) {
        if (rel.source == op.target) rel.source = op.id;
        if (rel.target == op.target) rel.target = op.id;
      }
    }
  }
  out.containers.emplace(op.id, std::move(c));
  return out;
}

GlyphDocument create_compositor(const GlyphDocument& doc, const CreateCompositor& op) {
  if (std::find(op.children.begin(), op.children.end(), op.id) != op.children.end()) {
    throw Error(ErrorCode::WouldCreateCycle, "a compositor cannot contain itself", "children");
  }
  check_new_id(doc, op.id);
  if (op.children.empty()) throw Error(ErrorCode::EmptyChildren, "a compositor needs children", "children");
  std::set<ContainerId> members;
  for (std::size_t i = 0; i < op.children.size(); ++i) {
    const auto& child = op.children[i];
    if (!members.insert(child).second) {
      throw Error(ErrorCode::DuplicateChild, "'" + child.str() + "' listed twice", "children", i);
    }
    if (!doc.find(child)) {
      throw Error(ErrorCode::UnknownChild, "no container with id '" + child.str() + "'", "children", i);
    }
  }
  for (std::size_t i = 0; i < op.relations.size(); ++i) {
    const auto& r = op.relations[i];
    if (!members.count(r.source) || !members.count(r.target)) {
      throw Error(ErrorCode::RelationOutsideChildren,
                  "relation " + r.source.str() + " -> " + r.target.str() + " references a non-child",
                  "relations", i);
    }
    if (r.source == r.target) {
      throw Error(ErrorCode::RelationCycle, "'" + r.source.str() + "' is related to itself", "relations", i);
    }
    if (!finite(r.distance)) throw Error(ErrorCode::BadValue, "distance must be finite", "relations", i);
  }
  if (has_relation_cycle(op.children, op.relations)) {
    throw Error(ErrorCode::RelationCycle, "spatial relations form a cycle", "relations");
  }

  CompositorBody body{op.children, op.relations};
  GlyphDocument out = doc;
  const auto parents = parent_map(doc);

  std::vector<std::pair<ContainerId, Attachment>> attached;
  for (const auto& child : op.children) {
    Attachment at = attachment_of(doc, parents, child);
    if (at.kind != Attachment::Kind::none) attached.emplace_back(child, at);
  }

  if (!attached.empty()) {
    const Attachment& first = attached.front().second;
    for (const auto& [child, at] : attached) {
      if (at.kind != first.kind || at.parent != first.parent ||
          (at.kind == Attachment::Kind::root && attached.size() > 1)) {
        throw Error(ErrorCode::ReparentConflict,
                    "children come from different places in the tree; '" + child.str() +
                        "' cannot be moved next to '" + attached.front().first.str() + "'",
                    "children");
      }
    }
    if (first.kind == Attachment::Kind::root) {
      out.root = op.id;
    } else {
      Container& parent = out.containers.at(first.parent);
      if (auto* r = std::get_if<RepeaterBody>(&parent.body)) {
        r->child = op.id;
      } else {
        auto& k = std::get<CompositorBody>(parent.body);
        std::vector<ContainerId> kept;
        bool inserted = false;
        for (const auto& id : k.children) {
          if (!members.count(id)) {
            kept.push_back(id);
          } else if (!inserted) {
            kept.push_back(op.id);
            inserted = true;
          }
        }
        k.children = std::move(kept);
        std::vector<SpatialRelation> stay;
        for (auto rel : k.relations) {
          const bool s_in = members.count(rel.source) > 0, t_in = members.count(rel.target) > 0;
          if (s_in && t_in) {
            body.relations.push_back(rel);
            continue;
          }
          if (s_in) rel.source = op.id;
          if (t_in) rel.target = op.id;
          stay.push_back(rel);
        }
        dedupe_relations(stay);
        k.relations = std::move(stay);
        if (has_relation_cycle(k.children, k.relations)) {
          throw Error(ErrorCode::RelationCycle,
                      "moving the children would create a relation cycle in '" + parent.id.str() + "'",
                      "children");
        }
      }
    }
  }

  dedupe_relations(body.relations);
  if (has_relation_cycle(body.children, body.relations)) {
    throw Error(ErrorCode::RelationCycle, "spatial relations form a cycle", "relations");
  }
  Container c;
  c.id = op.id;
  c.body = std::move(body);
  out.containers.emplace(op.id, std::move(c));
  return out;
}

void remove_binding(Container& c, const std::string& path) {
  std::erase_if(c.bindings, [&](const DataBinding& b) { return b.attribute_path == path; });
}

GlyphDocument modify_params(const GlyphDocument& doc, const ModifyParams& op) {
  GlyphDocument out = doc;
  Container& c = existing(out, op.target, ErrorCode::UnknownTarget, "target");
  const Container before = c;
  for (const auto& [name, value] : op.params) {
    const std::string path = expand_param_path(before, name, false);
    const AttributeSlot slot = resolve_attribute_path(doc, before, path);
    if (slot.per_instance()) {
      throw Error(ErrorCode::PathKindMismatch,
                  "'" + path + "' varies per instance; set it with EncodeData", path);
    }
    try {
      write_attribute(c, slot.field, value);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), path, e.index());
    }
    remove_binding(c, path);
  }
  return out;
}

void check_values(const AttributeSlot& slot, const EncodeData& op, const std::string& path) {
  const bool numeric = slot.type == AttrType::number || slot.type == AttrType::count;
  if (std::holds_alternative<Expression>(op.data)) {
    if (!numeric) {
      throw Error(ErrorCode::TypeMismatch, "'" + path + "' is not numeric; use a value list", path);
    }
    return;
  }
  const auto& values = std::get<ValueList>(op.data).values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto* d = std::get_if<double>(&values[i]);
    const auto* s = std::get_if<std::string>(&values[i]);
    if (numeric || op.scale) {
      if (!d) throw Error(ErrorCode::TypeMismatch, "'" + path + "' expects numbers", path, i);
      if (!std::isfinite(*d)) throw Error(ErrorCode::BadValue, "values must be finite", path, i);
      if (slot.type == AttrType::count && !op.scale && (*d < 1 || *d != std::floor(*d))) {
        throw Error(ErrorCode::BadValue, "counts must be positive integers", path, i);
      }
      continue;
    }
    if (slot.type == AttrType::points) {
      throw Error(ErrorCode::TypeMismatch, "point lists cannot be data-bound", path, i);
    }
    if (!s) throw Error(ErrorCode::TypeMismatch, "'" + path + "' expects strings", path, i);
    if (slot.type == AttrType::color && !is_valid_color(*s)) {
      throw Error(ErrorCode::BadValue, "'" + *s + "' is not a color (#RRGGBB, #RRGGBBAA or none)", path, i);
    }
  }
  if (op.scale && !numeric) {
    throw Error(ErrorCode::TypeMismatch, "a linear scale needs a numeric attribute", path);
  }
}

GlyphDocument encode_data(const GlyphDocument& doc, const EncodeData& op) {
  GlyphDocument out = doc;
  Container& c = existing(out, op.target, ErrorCode::UnknownTarget, "target");
  const std::string path = expand_param_path(c, op.path, true);
  const AttributeSlot slot = resolve_attribute_path(doc, c, path);

  if (const auto* list = std::get_if<ValueList>(&op.data)) {
    if (list->values.empty()) throw Error(ErrorCode::EmptyData, "no values to encode", path);
  } else {
    try {
      parse_expression(std::get<Expression>(op.data).text);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadExpression, e.detail(), path);
    }
  }
  if (op.scale) {
    const auto& s = *op.scale;
    if (!std::isfinite(s.domain_lo) || !std::isfinite(s.domain_hi) || !std::isfinite(s.range_lo) ||
        !std::isfinite(s.range_hi) || s.domain_lo == s.domain_hi) {
      throw Error(ErrorCode::BadScale, "scale domain must be two distinct finite numbers", path);
    }
  }
  check_values(slot, op, path);

  DataBinding b{path, op.data, op.scale};
  auto it = std::find_if(c.bindings.begin(), c.bindings.end(),
                         [&](const DataBinding& x) { return x.attribute_path == path; });
  if (it != c.bindings.end()) {
    *it = std::move(b);
  } else {
    c.bindings.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::string_view op_name(const Operation& op) {
  static constexpr std::string_view names[] = {"CreateBasic", "CreateRepeater", "CreateCompositor",
                                               "ModifyParams", "EncodeData"};
  return names[op.index()];
}

std::string op_echo(const Operation& op) {
  const ContainerId& id = std::visit(
      [](const auto& o) -> const ContainerId& {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ModifyParams> || std::is_same_v<T, EncodeData>) {
          return o.target;
        } else {
          return o.id;
        }
      },
      op);
  return std::string(op_name(op)) + "(\"" + id.str() + "\")";
}

std::string expand_param_path(const Container& c, std::string_view name, bool for_data) {
  if (name.find('.') != std::string_view::npos || name.find('[') != std::string_view::npos) {
    return std::string(name);
  }
  const std::string n(name);
  if (c.is_basic()) return "primitive." + n;
  if (c.is_repeater()) {
    if (for_data) return "instance.primitive." + n;
    if (n == "count") return "body.count";
    static const std::set<std::string> arrangement = {"mode", "axis", "gap", "radius", "startAngleDeg",
                                                      "deltaAngleDeg"};
    if (arrangement.count(n)) return "arrangement." + n;
  }
  return n;
}

GlyphDocument apply(const GlyphDocument& doc, const Operation& op, std::vector<std::string>* warnings) {
  GlyphDocument out;
  try {
    out = std::visit(
        [&](const auto& o) -> GlyphDocument {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, CreateBasic>) return create_basic(doc, o);
          if constexpr (std::is_same_v<T, CreateRepeater>) return create_repeater(doc, o);
          if constexpr (std::is_same_v<T, CreateCompositor>) return create_compositor(doc, o);
          if constexpr (std::is_same_v<T, ModifyParams>) return modify_params(doc, o);
          if constexpr (std::is_same_v<T, EncodeData>) return encode_data(doc, o);
        },
        op);
    const auto violations = validate_document(out);
    if (!violations.empty()) {
      const auto& v = violations.front();
      throw Error(ErrorCode::InvalidDocument,
                  "edit would leave the document invalid (" + std::string(to_string(v.kind)) + " at '" +
                      v.container.str() + "': " + v.message + ")",
                  v.container.str());
    }
  } catch (const Error& e) {
    throw Error(e.code(), op_echo(op) + ": " + e.detail(), e.field(), e.index());
  }
  out.version = doc.version + 1;
  if (warnings) {
    for (auto& w : document_warnings(out)) warnings->push_back(std::move(w));
  }
  return out;
}

GlyphDocument apply_recorded(const GlyphDocument& doc, const Operation& op, EditHistory& history,
                             std::vector<std::string>* warnings) {
  GlyphDocument out = gdsl::apply(doc, op, warnings);
  history.entries.push_back({op, doc.version, out.version});
  return out;
}

GlyphDocument replay(const GlyphDocument& initial, const EditHistory& history) {
  GlyphDocument cur = initial;
  for (std::size_t i = 0; i < history.entries.size(); ++i) {
    const auto& e = history.entries[i];
    if (e.version_before != cur.version) {
      throw Error(ErrorCode::ReplayDivergence,
                  "entry " + std::to_string(i) + " expects version " + std::to_string(e.version_before) +
                      " but the document is at " + std::to_string(cur.version),
                  "entries", i);
    }
    try {
      cur = gdsl::apply(cur, e.op);
    } catch (const Error& err) {
      throw Error(ErrorCode::ReplayDivergence, "entry " + std::to_string(i) + " failed: " + err.detail(),
                  "entries", i);
    }
    if (cur.version != e.version_after) {
      throw Error(ErrorCode::ReplayDivergence, "entry " + std::to_string(i) + " produced an unexpected version",
                  "entries", i);
    }
  }
  return cur;
}

std::vector<Operation> rebuild_script(const GlyphDocument& doc, const ContainerId& root) {
  std::vector<Operation> ops;
  auto set_placement = [&](const Container& c) {
    ModifyParams m;
    m.target = c.id;
    const Transform t;
    auto put = [&](const char* path, double v, double def) {
      if (v != def) m.params[path] = v;
    };
    put("transform.translate.x", c.transform.translate.x, t.translate.x);
    put("transform.translate.y", c.transform.translate.y, t.translate.y);
    put("transform.rotate.angleDeg", c.transform.rotate.angle_deg, t.rotate.angle_deg);
    put("transform.rotate.center.x", c.transform.rotate.center.x, t.rotate.center.x);
    put("transform.rotate.center.y", c.transform.rotate.center.y, t.rotate.center.y);
    put("transform.scale.sx", c.transform.scale.sx, t.scale.sx);
    put("transform.scale.sy", c.transform.scale.sy, t.scale.sy);
    put("coord.origin.x", c.coord.origin.x, 0.0);
    put("coord.origin.y", c.coord.origin.y, 0.0);
    if (!m.params.empty()) ops.emplace_back(std::move(m));
  };
  auto visit = [&](auto&& self, const ContainerId& id) -> void {
    const Container* c = doc.find(id);
    if (!c) throw Error(ErrorCode::UnknownTarget, "no container with id '" + id.str() + "'", "root");
    if (const auto* b = std::get_if<BasicBody>(&c->body)) {
      ops.emplace_back(CreateBasic{c->id, b->primitive.kind, b->primitive.attrs, c->coord, c->transform});
    } else if (const auto* r = std::get_if<RepeaterBody>(&c->body)) {
      self(self, r->child);
      CreateRepeater op;
      op.id = c->id;
      op.target = r->child;
      op.coord_kind = c->coord.kind;
      op.count = r->count;
      const Arrangement& a = r->arrangement;
      op.arrangement.mode = a.mode;
      if (a.mode == ArrangementMode::uniform) {
        if (c->coord.kind == CoordKind::cartesian) {
          op.arrangement.step = a.step;
        } else {
          op.arrangement.radius = a.radius;
          op.arrangement.start_angle_deg = a.start_angle_deg;
          op.arrangement.delta_angle_deg = a.delta_angle_deg;
        }
      } else if (a.mode == ArrangementMode::stacked) {
        op.arrangement.axis = a.axis;
        op.arrangement.gap = a.gap;
      }
      ops.emplace_back(std::move(op));
      set_placement(*c);
    } else {
      const auto& comp = std::get<CompositorBody>(c->body);
      for (const auto& ch : comp.children) self(self, ch);
      ops.emplace_back(CreateCompositor{c->id, comp.children, comp.relations});
      set_placement(*c);
    }
    for (const auto& b : c->bindings) ops.emplace_back(EncodeData{c->id, b.attribute_path, b.source, b.scale});
  };
  visit(visit, root);
  return ops;
}

}  // namespace gdsl
