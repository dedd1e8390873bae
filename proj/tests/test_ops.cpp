#include <doctest.h>

#include <functional>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/ops.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

CreateBasic circle(const char* id) {
  CreateBasic cb;
  cb.id = ContainerId(id);
  cb.kind = PrimitiveKind::circle;
  cb.params = {{"cx", 0.0}, {"cy", 0.0}, {"r", 5.0}};
  return cb;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::Io;
}

}  // namespace

TEST_SUITE("ops") {
  TEST_CASE("operations bump the version and leave the input alone") {
    const GlyphDocument empty;
    const GlyphDocument one = gdsl::apply(empty, circle("c"));
    CHECK(empty.containers.empty());
    CHECK(one.version == 1);
    CHECK(one.root == ContainerId("c"));
  }

  TEST_CASE("creation errors") {
    const GlyphDocument doc = gdsl::apply(GlyphDocument{}, circle("c"));
    CHECK(code_of([&] { gdsl::apply(doc, circle("c")); }) == ErrorCode::DuplicateId);
    CreateRepeater r;
    r.id = ContainerId("r");
    r.target = ContainerId("nope");
    CHECK(code_of([&] { gdsl::apply(doc, r); }) == ErrorCode::UnknownTarget);
    CreateBasic bad = circle("d");
    bad.params.erase("r");
    CHECK(code_of([&] { gdsl::apply(doc, bad); }) == ErrorCode::BadPrimitiveParams);
    CreateCompositor empty_comp;
    empty_comp.id = ContainerId("k");
    CHECK(code_of([&] { gdsl::apply(doc, empty_comp); }) == ErrorCode::EmptyChildren);
  }

  TEST_CASE("repeater wrapping the root becomes the root") {
    GlyphDocument doc = gdsl::apply(GlyphDocument{}, circle("c"));
    CreateRepeater r;
    r.id = ContainerId("ring");
    r.target = ContainerId("c");
    r.coord_kind = CoordKind::polar;
    r.count = 6;
    doc = gdsl::apply(doc, r);
    CHECK(doc.root == ContainerId("ring"));
    const auto& body = std::get<RepeaterBody>(doc.find(ContainerId("ring"))->body);
    CHECK(body.arrangement.delta_angle_deg == doctest::Approx(60));
  }

  TEST_CASE("modify params with shorthand and full paths") {
    GlyphDocument doc = test::build("operations.ops.json");
    ModifyParams m;
    m.target = ContainerId("rect1");
    m.params = {{"fill", std::string("#00ff00")}};
    doc = gdsl::apply(doc, m);
    CHECK(std::get<BasicBody>(doc.find(ContainerId("rect1"))->body).primitive.string("fill") == "#00ff00");
    m.params = {{"primitive.r", 3.0}};
    CHECK(code_of([&] { gdsl::apply(doc, m); }) == ErrorCode::UnknownPath);
    m.target = ContainerId("flower");
    m.params = {{"count", 8.0}};
    doc = gdsl::apply(doc, m);
    CHECK(std::get<RepeaterBody>(doc.find(ContainerId("flower"))->body).count == 8);
    m.params = {{"count", 2.5}};
    CHECK(code_of([&] { gdsl::apply(doc, m); }) == ErrorCode::TypeMismatch);
  }

  TEST_CASE("encode data on a basic container rejects instance paths") {
    const GlyphDocument doc = gdsl::apply(GlyphDocument{}, circle("c"));
    EncodeData e;
    e.target = ContainerId("c");
    e.path = "instance.scale.sx";
    e.data = ValueList{{1.0}};
    CHECK(code_of([&] { gdsl::apply(doc, e); }) == ErrorCode::PathKindMismatch);
    e.path = "primitive.r";
    e.data = ValueList{};
    CHECK(code_of([&] { gdsl::apply(doc, e); }) == ErrorCode::EmptyData);
  }

  TEST_CASE("history replays to the same document") {
    GlyphDocument doc;
    EditHistory h;
    for (const auto& op : test::load_ops("garden.ops.json")) doc = apply_recorded(doc, op, h);
    CHECK(h.entries.size() == 6);
    CHECK(replay(GlyphDocument{}, h) == doc);
    const EditHistory back = history_from_json(to_json(h));
    CHECK(back == h);
    h.entries[2].version_before = 7;
    CHECK(code_of([&] { replay(GlyphDocument{}, h); }) == ErrorCode::ReplayDivergence);
  }

  TEST_CASE("rebuild script recreates a subtree") {
    const GlyphDocument doc = test::build("snowflake.ops.json");
    GlyphDocument again;
    for (const auto& op : rebuild_script(doc, *doc.root)) again = gdsl::apply(again, op);
    CHECK(serialize(again).size() > 0);
    again.version = doc.version;
    CHECK(again == doc);
  }

  TEST_CASE("operation JSON round-trip and unknown keys") {
    for (const auto& op : test::load_ops("operations.ops.json")) CHECK(operation_from_json(to_json(op)) == op);
    Json bad = to_json(Operation{circle("c")});
    bad["colour"] = "red";
    CHECK(code_of([&] { operation_from_json(bad); }) == ErrorCode::SchemaViolation);
  }
}
