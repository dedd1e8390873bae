#pragma once

// Expansion of a document into a scene: repeaters are unrolled per their
// arrangement, bindings are materialized, compositor relations are solved.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdsl/geometry.hpp"
#include "gdsl/model.hpp"
#include "gdsl/scene.hpp"

namespace gdsl {

// Per-instance placement values coming from `instance.*` bindings.
struct InstanceData {
  std::optional<double> translate_x, translate_y;
  std::optional<double> rotate_deg;
  std::optional<double> scale_x, scale_y;
};

// Placement of instance i. The arrangement baseline is
//   uniform cartesian: translate i * step
//   uniform polar:     rotate(start + i * delta) about the origin after
//                      translating by (radius, 0)
//   stacked:           abut instance i-1 along the axis plus gap
//   flexible:          identity
// and instance data is applied inside it: baseline * T(d) * R(phi) * S(s).
// `own` is the bound of instance i placed by its data alone (stacked only;
// when null the leading edge is taken to be 0). Throws MissingPrevBBox and
// UnsupportedArrangement.
Transform instance_transform(const Arrangement& arr, const CoordinateSystem& coord, int i,
                             const std::vector<BBox>& prev, const InstanceData& data = {},
                             const BBox* own = nullptr);

// Anchors used by a relation type: source anchor, then target anchor.
AnchorName source_anchor(RelType t);
AnchorName target_anchor(RelType t);

// Translations that place each child (same order as body.children). The
// child scenes already carry their own matrices. Throws RelationCycle and
// OverConstrained. Text leaves that are the source of a center relation are
// flagged `text_middle` in place.
std::vector<AffineMatrix> solve_composition(const CompositorBody& body,
                                            std::vector<SceneNode>& child_scenes);

struct LayoutOptions {
  std::optional<std::uint64_t> seed_override;
};

// Full scene from the root. An empty document yields an empty group.
// Non-fatal findings (binding length mismatches) go to `warnings`.
SceneNode instantiate(const GlyphDocument& doc, const LayoutOptions& options = {},
                      std::vector<std::string>* warnings = nullptr);

// Scene of one container's subtree, including its own matrix.
SceneNode instantiate_container(const GlyphDocument& doc, const ContainerId& id,
                                const LayoutOptions& options = {},
                                std::vector<std::string>* warnings = nullptr);

// Bound of a container as its parent sees it.
BBox container_bbox(const GlyphDocument& doc, const ContainerId& id);

// to_matrix(transform) * translate(coord.origin).
AffineMatrix container_matrix(const Container& c);

}  // namespace gdsl
