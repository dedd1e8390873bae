#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gdsl/error.hpp"
#include "gdsl/model.hpp"

namespace gdsl {

enum class ViolationKind {
  InvalidId,
  IdMismatch,
  DanglingReference,
  CycleDetected,
  MultipleParents,
  RootHasParent,
  EmptyCompositor,
  DuplicateChild,
  RelationOutsideChildren,
  SelfRelation,
  RelationCycle,
  BadCount,
  BadPrimitive,
  BadTransform,
  BadCoordinate,
  BadArrangement,
  BadBinding,
  DuplicateBinding,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ContainerId container;
  ViolationKind kind;
  std::string message;
};

// Empty iff every structural invariant of the document holds. Never throws.
std::vector<Violation> validate_document(const GlyphDocument& doc);

// Non-fatal findings: containers not reachable from the root.
std::vector<std::string> document_warnings(const GlyphDocument& doc);

// child -> parent, for every container referenced by a repeater or compositor.
// Containers with several parents keep the first one encountered in id order.
std::map<ContainerId, ContainerId> parent_map(const GlyphDocument& doc);

// Containers reachable from root, in depth-first pre-order.
std::vector<ContainerId> reachable_from_root(const GlyphDocument& doc);

// Containers that are neither the root nor anyone's child.
std::vector<ContainerId> unattached(const GlyphDocument& doc);

// True when `relations` over `members` contain a dependency cycle.
bool has_relation_cycle(const std::vector<ContainerId>& members,
                        const std::vector<SpatialRelation>& relations);

// --- primitives -----------------------------------------------------------

enum class AttrType { number, count, string, color, points, mode, axis };

// Required attribute names for a kind, then the optional styling attributes.
const std::vector<std::string>& required_attrs(PrimitiveKind kind);
const std::vector<std::string>& styling_attrs();
std::optional<AttrType> primitive_attr_type(PrimitiveKind kind, std::string_view name);

// Human-readable problems with a primitive's attributes; empty when valid.
std::vector<std::string> primitive_problems(const Primitive& p);

// --- colors ---------------------------------------------------------------

// `#RRGGBB`, `#RRGGBBAA` or `none`.
bool is_valid_color(std::string_view s);

// Normalizes `#rgb`, hex and the 16 basic CSS color names to lowercase hex.
std::optional<std::string> normalize_color(std::string_view s);

// The 16 basic CSS names with their hex values, e.g. {"blue", "#0000ff"}.
const std::vector<std::pair<std::string, std::string>>& basic_color_names();

// --- attribute paths ------------------------------------------------------

struct AttributeSlot {
  enum class Scope {
    container,           // a field of the container itself
    instance_placement,  // per-instance translate/rotate/scale of a repeater
    instance_descendant  // per-instance override of a field on a descendant
  };
  Scope scope = Scope::container;
  std::string path;   // canonical full path
  std::string field;  // field relative to the affected container
  AttrType type = AttrType::number;
  std::optional<ContainerId> descendant;  // instance_descendant only

  bool per_instance() const { return scope != Scope::container; }
};

// Resolves a dot path against a container's schema. Paths prefixed
// `instance.` are only valid on repeaters; `instance[<id>].<field>` addresses
// a descendant of the repeater's child. Throws UnknownPath / PathKindMismatch.
AttributeSlot resolve_attribute_path(const Container& c, std::string_view path);

// As above but checks descendants referenced by instance paths exist and
// have the addressed field.
AttributeSlot resolve_attribute_path(const GlyphDocument& doc, const Container& c,
                                     std::string_view path);

// Read/write a container-scope field (`slot.field`). write_attribute
// type-checks and throws TypeMismatch / BadValue.
AttrValue read_attribute(const Container& c, std::string_view field);
void write_attribute(Container& c, std::string_view field, const AttrValue& value);

// True when `ancestor` contains `id` (or they are equal).
bool is_ancestor_or_self(const GlyphDocument& doc, const ContainerId& ancestor,
                         const ContainerId& id);

}  // namespace gdsl
