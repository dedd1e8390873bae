#include <doctest.h>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/ops.hpp"
#include "support.hpp"

using namespace gdsl;

TEST_SUITE("core") {
  TEST_CASE("colors normalize to lowercase hex") {
    CHECK(normalize_color("#ABC") == "#aabbcc");
    CHECK(normalize_color("blue") == "#0000ff");
    CHECK(normalize_color("#FF000080") == "#ff000080");
    CHECK(normalize_color("none") == "none");
    CHECK_FALSE(normalize_color("bluish").has_value());
    CHECK(is_valid_color("#00ff00"));
    CHECK_FALSE(is_valid_color("red"));
  }

  TEST_CASE("fixture documents validate") {
    for (const char* f : {"garden.ops.json", "snowflake.ops.json", "nl_base.ops.json"}) {
      CHECK(validate_document(test::build(f)).empty());
    }
  }

  TEST_CASE("attribute paths resolve by container kind") {
    const GlyphDocument doc = test::build("garden.ops.json");
    const Container& garden = *doc.find(ContainerId("garden"));
    const auto slot = resolve_attribute_path(doc, garden, "instance[green stem].transform.scale.sy");
    CHECK(slot.scope == AttributeSlot::Scope::instance_descendant);
    CHECK(slot.descendant == ContainerId("green stem"));
    CHECK(resolve_attribute_path(garden, "instance.scale.sx+sy").scope == AttributeSlot::Scope::instance_placement);
    const Container& stem = *doc.find(ContainerId("green stem"));
    CHECK_THROWS_AS(resolve_attribute_path(stem, "instance.scale.sx"), Error);
    CHECK_THROWS_AS(resolve_attribute_path(stem, "primitive.r"), Error);
    CHECK(resolve_attribute_path(stem, "primitive.height").type == AttrType::number);
  }

  TEST_CASE("dangling child is a violation") {
    GlyphDocument doc = test::build("garden.ops.json");
    std::get<RepeaterBody>(doc.find(ContainerId("garden"))->body).child = ContainerId("missing");
    const auto v = validate_document(doc);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().kind == ViolationKind::DanglingReference);
  }

  TEST_CASE("parent map and unattached containers") {
    const GlyphDocument doc = test::build("nl_base.ops.json");
    const auto parents = parent_map(doc);
    CHECK(parents.at(ContainerId("curve")) == ContainerId("curves"));
    const auto loose = unattached(doc);
    CHECK(std::find(loose.begin(), loose.end(), ContainerId("square")) != loose.end());
    CHECK(std::find(loose.begin(), loose.end(), ContainerId("curve")) == loose.end());
  }

  TEST_CASE("relation cycles are detected") {
    const std::vector<ContainerId> m{ContainerId("a"), ContainerId("b")};
    std::vector<SpatialRelation> rel{{ContainerId("a"), ContainerId("b"), RelType::top, {}}};
    CHECK_FALSE(has_relation_cycle(m, rel));
    rel.push_back({ContainerId("b"), ContainerId("a"), RelType::left, {}});
    CHECK(has_relation_cycle(m, rel));
  }
}
