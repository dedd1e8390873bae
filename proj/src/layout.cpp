#include "gdsl/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gdsl/core.hpp"
#include "gdsl/databind.hpp"
#include "gdsl/error.hpp"

namespace gdsl {

namespace {

constexpr double kOverConstrainedTol = 1e-6;
constexpr std::size_t kMaxSceneNodes = 2'000'000;

Vec2 rotate_vec(Vec2 v, double deg) {
  const double cs = cos_deg(deg), sn = sin_deg(deg);
  return {cs * v.x - sn * v.y, sn * v.x + cs * v.y};
}

Transform data_transform(const InstanceData& d) {
  Transform t;
  t.translate = {d.translate_x.value_or(0.0), d.translate_y.value_or(0.0)};
  t.rotate.angle_deg = d.rotate_deg.value_or(0.0);
  t.scale = {d.scale_x.value_or(1.0), d.scale_y.value_or(1.0)};
  return t;
}

AttrValue to_attr(const Scalar& s) {
  if (const auto* d = std::get_if<double>(&s)) return *d;
  return std::get<std::string>(s);
}

double scalar_number(const Scalar& s, const std::string& path, std::size_t index) {
  const auto* d = std::get_if<double>(&s);
  if (!d) throw Error(ErrorCode::TypeMismatch, "'" + path + "' expects numbers", path, index);
  return *d;
}

struct Override {
  ContainerId target;
  std::string field;
  AttrValue value;
  std::string path;  // binding path, for error messages
};

class Expander {
 public:
  Expander(const GlyphDocument& doc, std::uint64_t seed, std::vector<std::string>* warnings)
      : doc_(doc), seed_(seed), warnings_(warnings) {}

  SceneNode expand(const ContainerId& id, const std::vector<Override>& inherited) {
    const Container* found = doc_.find(id);
    if (!found) throw Error(ErrorCode::UnknownChild, "container '" + id.str() + "' does not exist", id.str());
    if (!on_path_.insert(id).second) {
      throw Error(ErrorCode::InvalidDocument, "containment cycle through '" + id.str() + "'", id.str());
    }
    try {
      SceneNode node = expand_body(*found, inherited);
      on_path_.erase(id);
      return node;
    } catch (const Error& e) {
      on_path_.erase(id);
      throw Error(e.code(), id.str() + " > " + e.detail(), e.field(), e.index());
    }
  }

 private:
  SplitMix64& stream(const ContainerId& id, const std::string& path) {
    const std::string key = id.str() + '\0' + path;
    auto it = streams_.find(key);
    if (it == streams_.end()) {
      it = streams_.emplace(key, SplitMix64(binding_seed(seed_, id, path))).first;
    }
    return it->second;
  }

  std::vector<Scalar> materialize(const Container& c, const DataBinding& b, int count) {
    Materialized m = materialize_binding(b, count, stream(c.id, b.attribute_path));
    if (warnings_) {
      for (auto& w : m.warnings) warnings_->push_back(c.id.str() + ": " + w);
    }
    return std::move(m.values);
  }

  void count_node() {
    if (++nodes_ > kMaxSceneNodes) {
      throw Error(ErrorCode::BadValue, "scene exceeds " + std::to_string(kMaxSceneNodes) + " nodes");
    }
  }

  SceneNode expand_body(const Container& original, const std::vector<Override>& inherited) {
    Container c = original;
    count_node();

    // Static bindings first, then per-instance values pushed down by
    // enclosing repeaters (outermost first, so the innermost wins).
    for (const auto& b : original.bindings) {
      const AttributeSlot slot = resolve_attribute_path(doc_, original, b.attribute_path);
      if (slot.per_instance()) continue;
      const auto values = materialize(original, b, 1);
      write_attribute(c, slot.field, to_attr(values.front()));
    }
    for (const auto& o : inherited) {
      if (o.target == c.id) write_attribute(c, o.field, o.value);
    }

    const AffineMatrix m = container_matrix(c);
    if (const auto* basic = std::get_if<BasicBody>(&c.body)) {
      return SceneNode::leaf(c.id.str(), basic->primitive, m);
    }

    SceneNode group = SceneNode::group(c.id.str(), m);
    if (const auto* comp = std::get_if<CompositorBody>(&c.body)) {
      std::vector<SceneNode> kids;
      kids.reserve(comp->children.size());
      for (const auto& child : comp->children) kids.push_back(expand(child, inherited));
      const auto placements = solve_composition(*comp, kids);
      for (std::size_t k = 0; k < kids.size(); ++k) {
        kids[k].matrix = compose(placements[k], kids[k].matrix);
      }
      group.children = std::move(kids);
      return group;
    }

    const auto& rep = std::get<RepeaterBody>(c.body);
    const int n = rep.count;
    std::vector<InstanceData> data(static_cast<std::size_t>(n));
    std::vector<std::vector<Override>> overrides(static_cast<std::size_t>(n));

    for (const auto& b : original.bindings) {
      const AttributeSlot slot = resolve_attribute_path(doc_, original, b.attribute_path);
      if (!slot.per_instance()) continue;
      const auto values = materialize(original, b, n);
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (slot.scope == AttributeSlot::Scope::instance_placement) {
          const double v = scalar_number(values[idx], b.attribute_path, idx);
          auto& d = data[idx];
          if (slot.field == "translate.x") d.translate_x = v;
          else if (slot.field == "translate.y") d.translate_y = v;
          else if (slot.field == "rotate.angleDeg") d.rotate_deg = v;
          else if (slot.field == "scale.sx") d.scale_x = v;
          else if (slot.field == "scale.sy") d.scale_y = v;
          else if (slot.field == "scale.sx+sy") d.scale_x = d.scale_y = v;
        } else {
          overrides[idx].push_back({*slot.descendant, slot.field, to_attr(values[idx]), b.attribute_path});
        }
      }
    }

    std::vector<BBox> placed;
    group.children.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      try {
        std::vector<Override> scoped = inherited;
        scoped.insert(scoped.end(), overrides[idx].begin(), overrides[idx].end());
        SceneNode child = expand(rep.child, scoped);
        Transform t;
        if (rep.arrangement.mode == ArrangementMode::stacked) {
          const BBox own = node_bbox(child, to_matrix(data_transform(data[idx])));
          t = instance_transform(rep.arrangement, c.coord, i, placed, data[idx], &own);
        } else {
          t = instance_transform(rep.arrangement, c.coord, i, placed, data[idx]);
        }
        child.matrix = compose(to_matrix(t), child.matrix);
        if (rep.arrangement.mode == ArrangementMode::stacked) placed.push_back(node_bbox(child));
        group.children.push_back(std::move(child));
      } catch (const Error& e) {
        throw Error(e.code(), "[instance " + std::to_string(i) + "] " + e.detail(), e.field(),
                    e.index() ? e.index() : std::optional<std::size_t>(idx));
      }
    }
    return group;
  }

  const GlyphDocument& doc_;
  std::uint64_t seed_;
  std::vector<std::string>* warnings_;
  std::map<std::string, SplitMix64> streams_;
  std::set<ContainerId> on_path_;
  std::size_t nodes_ = 0;
};

}  // namespace

AffineMatrix container_matrix(const Container& c) {
  return compose(to_matrix(c.transform), AffineMatrix::translation(c.coord.origin));
}

Transform instance_transform(const Arrangement& arr, const CoordinateSystem& coord, int i,
                             const std::vector<BBox>& prev, const InstanceData& data,
                             const BBox* own) {
  Vec2 base;
  double base_angle = 0.0;
  switch (arr.mode) {
    case ArrangementMode::uniform:
      if (coord.kind == CoordKind::cartesian) {
        base = arr.step * static_cast<double>(i);
      } else {
        base_angle = arr.start_angle_deg + static_cast<double>(i) * arr.delta_angle_deg;
        base = rotate_vec({arr.radius, 0.0}, base_angle);
      }
      break;
    case ArrangementMode::stacked: {
      if (coord.kind == CoordKind::polar) {
        throw Error(ErrorCode::UnsupportedArrangement,
                    "stacked arrangement is only supported in cartesian coordinates");
      }
      if (i == 0) break;
      if (prev.size() < static_cast<std::size_t>(i) || !prev[static_cast<std::size_t>(i) - 1].valid) {
        throw Error(ErrorCode::MissingPrevBBox,
                    "stacked instance " + std::to_string(i) + " needs the previous instance's bound",
                    {}, static_cast<std::size_t>(i));
      }
      const BBox& p = prev[static_cast<std::size_t>(i) - 1];
      const bool valid_own = own && own->valid;
      if (arr.axis == Axis::x) {
        base.x = p.max_x + arr.gap - (valid_own ? own->min_x : 0.0);
      } else {
        base.y = p.max_y + arr.gap - (valid_own ? own->min_y : 0.0);
      }
      break;
    }
    case ArrangementMode::flexible:
      break;
  }

  const Transform d = data_transform(data);
  Transform t;
  t.translate = base + rotate_vec(d.translate, base_angle);
  t.rotate.angle_deg = base_angle + d.rotate.angle_deg;
  t.scale = d.scale;
  return t;
}

AnchorName source_anchor(RelType t) {
  switch (t) {
    case RelType::top: return AnchorName::bottomCenter;
    case RelType::bottom: return AnchorName::topCenter;
    case RelType::left: return AnchorName::rightCenter;
    case RelType::right: return AnchorName::leftCenter;
    case RelType::center: return AnchorName::center;
  }
  return AnchorName::center;
}

AnchorName target_anchor(RelType t) {
  switch (t) {
    case RelType::top: return AnchorName::topCenter;
    case RelType::bottom: return AnchorName::bottomCenter;
    case RelType::left: return AnchorName::leftCenter;
    case RelType::right: return AnchorName::rightCenter;
    case RelType::center: return AnchorName::center;
  }
  return AnchorName::center;
}

std::vector<AffineMatrix> solve_composition(const CompositorBody& body,
                                            std::vector<SceneNode>& child_scenes) {
  const std::size_t n = body.children.size();
  std::map<ContainerId, std::size_t> index;
  for (std::size_t k = 0; k < n; ++k) index.emplace(body.children[k], k);

  for (const auto& r : body.relations) {
    if (!index.count(r.source) || !index.count(r.target)) {
      throw Error(ErrorCode::RelationOutsideChildren,
                  "relation " + r.source.str() + " -> " + r.target.str() + " references a non-child");
    }
    if (r.source == r.target) {
      throw Error(ErrorCode::RelationCycle, "'" + r.source.str() + "' is related to itself");
    }
    if (r.type == RelType::center) {
      auto& s = child_scenes[index[r.source]];
      if (s.is_leaf() && s.primitive.kind == PrimitiveKind::text) s.text_middle = true;
    }
  }

  // Kahn's algorithm, edges target -> source, ties broken by child order.
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& r : body.relations) {
    out[index[r.target]].push_back(index[r.source]);
    indegree[index[r.source]]++;
  }
  std::set<std::size_t> ready;
  for (std::size_t k = 0; k < n; ++k) {
    if (indegree[k] == 0) ready.insert(k);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t k = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(k);
    for (std::size_t s : out[k]) {
      if (--indegree[s] == 0) ready.insert(s);
    }
  }
  if (order.size() != n) throw Error(ErrorCode::RelationCycle, "spatial relations form a cycle");

  std::vector<BBox> base(n);
  for (std::size_t k = 0; k < n; ++k) base[k] = node_bbox(child_scenes[k]);

  std::vector<Vec2> offset(n);
  std::vector<bool> placed(n, false);
  for (std::size_t k : order) {
    for (const auto& r : body.relations) {
      if (index[r.source] != k) continue;
      const std::size_t t = index[r.target];
      if (!base[k].valid || !base[t].valid) {
        throw Error(ErrorCode::EmptyGeometry,
                    "relation " + r.source.str() + " -> " + r.target.str() + " involves an empty container");
      }
      const Vec2 target_pt = anchor_point(base[t], target_anchor(r.type)) + offset[t];
      const Vec2 source_pt = anchor_point(base[k], source_anchor(r.type));
      const Vec2 delta = target_pt + r.distance - source_pt;
      if (!placed[k]) {
        offset[k] = delta;
        placed[k] = true;
      } else if (std::abs(delta.x - offset[k].x) > kOverConstrainedTol ||
                 std::abs(delta.y - offset[k].y) > kOverConstrainedTol) {
        throw Error(ErrorCode::OverConstrained,
                    "'" + r.source.str() + "' is placed by conflicting relations", r.source.str());
      }
    }
  }

  std::vector<AffineMatrix> result;
  result.reserve(n);
  for (const auto& o : offset) result.push_back(AffineMatrix::translation(o));
  return result;
}

SceneNode instantiate(const GlyphDocument& doc, const LayoutOptions& options,
                      std::vector<std::string>* warnings) {
  if (!doc.root) return SceneNode::group("");
  return instantiate_container(doc, *doc.root, options, warnings);
}

SceneNode instantiate_container(const GlyphDocument& doc, const ContainerId& id,
                                const LayoutOptions& options, std::vector<std::string>* warnings) {
  Expander ex(doc, options.seed_override.value_or(doc.rng_seed), warnings);
  return ex.expand(id, {});
}

BBox container_bbox(const GlyphDocument& doc, const ContainerId& id) {
  return node_bbox(instantiate_container(doc, id));
}

}  // namespace gdsl
