#pragma once

// The five document edits and their history.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gdsl/model.hpp"
#include "gdsl/serialize.hpp"

namespace gdsl {

// Arrangement parameters as given by the caller; missing ones get defaults
// when the repeater is created.
struct ArrangementSpec {
  std::optional<ArrangementMode> mode;
  std::optional<Vec2> step;
  std::optional<double> radius;
  std::optional<double> start_angle_deg;
  std::optional<double> delta_angle_deg;
  std::optional<Axis> axis;
  std::optional<double> gap;
  friend bool operator==(const ArrangementSpec&, const ArrangementSpec&) = default;
};

struct CreateBasic {
  ContainerId id;
  PrimitiveKind kind = PrimitiveKind::rect;
  AttrMap params;
  CoordinateSystem coord;
  Transform transform;
  friend bool operator==(const CreateBasic&, const CreateBasic&) = default;
};

struct CreateRepeater {
  ContainerId id;
  ContainerId target;
  CoordKind coord_kind = CoordKind::cartesian;
  int count = 1;
  ArrangementSpec arrangement;
  friend bool operator==(const CreateRepeater&, const CreateRepeater&) = default;
};

struct CreateCompositor {
  ContainerId id;
  std::vector<ContainerId> children;
  std::vector<SpatialRelation> relations;
  friend bool operator==(const CreateCompositor&, const CreateCompositor&) = default;
};

// A bare name is shorthand: `fill` on a basic
// container means `primitive.fill`; `count` on a repeater means `body.count`
// and `radius`, `gap`, ... mean `arrangement.<name>`.
struct ModifyParams {
  ContainerId target;
  std::map<std::string, AttrValue> params;
  friend bool operator==(const ModifyParams&, const ModifyParams&) = default;
};

// A bare attribute name on a repeater means `instance.primitive.<name>`,
// on a basic container `primitive.<name>`.
struct EncodeData {
  ContainerId target;
  std::string path;
  DataSource data;
  std::optional<LinearScale> scale;
  friend bool operator==(const EncodeData&, const EncodeData&) = default;
};

using Operation = std::variant<CreateBasic, CreateRepeater, CreateCompositor, ModifyParams, EncodeData>;

std::string_view op_name(const Operation& op);

// Short echo used in error messages, e.g. `CreateRepeater("flower")`.
std::string op_echo(const Operation& op);

// Returns the edited copy with version + 1. Throws on failure; the input is
// never touched. Post-edit documents are validated and a violation is
// reported as InvalidDocument. Warnings (unattached containers) are appended
// to `warnings` when given.
GlyphDocument apply(const GlyphDocument& doc, const Operation& op,
                    std::vector<std::string>* warnings = nullptr);

// Full path a (possibly bare) attribute name refers to on `c`.
std::string expand_param_path(const Container& c, std::string_view name, bool for_data);

struct HistoryEntry {
  Operation op;
  std::int64_t version_before = 0;
  std::int64_t version_after = 0;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct EditHistory {
  std::vector<HistoryEntry> entries;
  friend bool operator==(const EditHistory&, const EditHistory&) = default;
};

// Applies `op` and records it.
GlyphDocument apply_recorded(const GlyphDocument& doc, const Operation& op, EditHistory& history,
                             std::vector<std::string>* warnings = nullptr);

// Re-applies every entry. Throws ReplayDivergence (index = entry) when an
// entry fails or its recorded versions do not match.
GlyphDocument replay(const GlyphDocument& initial, const EditHistory& history);

// Operations that recreate the subtree under `root` (children first), e.g.
// to merge containers from another document through the normal edit path.
std::vector<Operation> rebuild_script(const GlyphDocument& doc, const ContainerId& root);

// --- JSON ---------------------------------------------------------------------

Json to_json(const Operation& op);
Operation operation_from_json(const Json& j, const std::string& ptr = "");
std::vector<Operation> operations_from_json(const Json& j);

Json to_json(const EditHistory& h);
EditHistory history_from_json(const Json& j);

}  // namespace gdsl
