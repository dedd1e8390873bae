#include <doctest.h>

#include "gdsl/error.hpp"
#include "gdsl/nlcmd.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

GlyphDocument base() {
  GlyphDocument doc;
  for (const auto& op : test::load_ops("nl_base.ops.json")) doc = gdsl::apply(doc, op);
  return doc;
}

const Slot* slot(const ParseResult& r, const std::string& id) {
  for (const auto& s : r.proposal->slots) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("nlcmd") {
  TEST_CASE("sentence splitting") {
    const auto s = split_sentences("Make it red. Then copy it 3 times!  ");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == "Then copy it 3 times");
  }

  TEST_CASE("defaulted slots are flagged") {
    const auto r = parse_command("rotate and copy the branch 6 times", base());
    REQUIRE(r.is_proposal());
    const Slot* count = slot(r, "count");
    REQUIRE(count);
    CHECK_FALSE(count->defaulted);
    bool any_defaulted = false;
    for (const auto& s : r.proposal->slots) any_defaulted = any_defaulted || s.defaulted;
    CHECK(any_defaulted);
    CHECK(r.proposal->explanation.find("{{") != std::string::npos);
  }

  TEST_CASE("filling a slot rebuilds the operation") {
    const GlyphDocument doc = base();
    const auto r = parse_command("Change the circle's fill to blue", doc);
    REQUIRE(r.is_proposal());
    std::string color_slot;
    for (const auto& s : r.proposal->slots) {
      if (s.kind == SlotKind::color) color_slot = s.id;
    }
    REQUIRE_FALSE(color_slot.empty());
    const auto filled = fill_slot(r, color_slot, std::string("green"), doc);
    const auto& op = std::get<ModifyParams>(filled.proposal->operation);
    CHECK(std::get<std::string>(op.params.at("primitive.fill")) == "#008000");
    CHECK_THROWS_AS(fill_slot(r, "nope", 1.0, doc), Error);
    CHECK_THROWS_AS(fill_slot(r, color_slot, std::string("not a color"), doc), Error);
  }

  TEST_CASE("selection resolves pronouns") {
    const auto r = parse_command("duplicate it 3 times", base(), ContainerId("diamond"));
    REQUIRE(r.is_proposal());
    CHECK(std::get<CreateRepeater>(r.proposal->operation).target == ContainerId("diamond"));
  }

  TEST_CASE("unmatched text gives a suggestion, backend consulted first") {
    const GlyphDocument doc = base();
    const auto none = parse_command("sing a song", doc);
    CHECK_FALSE(none.is_proposal());
    CHECK_FALSE(none.suggestion->example_commands.empty());

    MockBackend mock(Json{{"sing a song",
                           {{"operation", {{"op", "ModifyParams"}, {"target", "circle"}, {"params", {{"primitive.r", 3}}}}}}}});
    const auto r = parse_command("Sing a song", doc, std::nullopt, &mock);
    REQUIRE(r.is_proposal());
    CHECK(std::holds_alternative<ModifyParams>(r.proposal->operation));

    MockBackend bad(Json{{"sing a song", {{"operation", {{"op", "ModifyParams"}, {"target", "ghost"}, {"params", {{"primitive.r", 3}}}}}}}});
    CHECK_FALSE(parse_command("sing a song", doc, std::nullopt, &bad).is_proposal());
  }

  TEST_CASE("parse results round-trip through JSON") {
    const auto r = parse_command("Place a circle 50 units above the rectangle.", base());
    CHECK(parse_result_from_json(to_json(r)) == r);
    const auto s = parse_command("what day is it today", base());
    CHECK(parse_result_from_json(to_json(s)) == s);
  }

  TEST_CASE("generated ids do not clash") {
    GlyphDocument doc = base();
    const auto r = parse_command("Add a triangle above the square", doc);
    REQUIRE(r.is_proposal());
    doc = gdsl::apply(doc, r.proposal->operation);
    const auto again = parse_command("Add a triangle above the square", doc);
    REQUIRE(again.is_proposal());
    const auto& op = std::get<CreateCompositor>(again.proposal->operation);
    CHECK(doc.containers.count(op.id) == 0);
  }
}
