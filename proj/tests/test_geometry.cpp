#include <doctest.h>

#include <cmath>

#include "gdsl/geometry.hpp"
#include "gdsl/path.hpp"

using namespace gdsl;

TEST_SUITE("geometry") {
  TEST_CASE("rotation turns +x towards +y") {
    const AffineMatrix r = AffineMatrix::rotation_deg(90);
    const Vec2 p = r.apply({1, 0});
    CHECK(p.x == 0);
    CHECK(p.y == 1);
  }

  TEST_CASE("compose applies inner first") {
    const AffineMatrix t = AffineMatrix::translation({5, 0});
    const AffineMatrix s = AffineMatrix::scaling(2, 2);
    const Vec2 p = compose(t, s).apply({1, 1});
    CHECK(p.x == 7);
    CHECK(p.y == 2);
  }

  TEST_CASE("decompose inverts to_matrix") {
    Transform t;
    t.translate = {3, -4};
    t.rotate.angle_deg = 30;
    t.scale = {2, 0.5};
    const auto back = decompose(to_matrix(t));
    REQUIRE(back.has_value());
    const AffineMatrix m1 = to_matrix(t), m2 = to_matrix(*back);
    for (Vec2 p : {Vec2{0, 0}, Vec2{1, 2}, Vec2{-3, 5}}) {
      CHECK(std::abs(m1.apply(p).x - m2.apply(p).x) < 1e-9);
      CHECK(std::abs(m1.apply(p).y - m2.apply(p).y) < 1e-9);
    }
    CHECK_FALSE(decompose(AffineMatrix{1, 0, 0.5, 1, 0, 0}).has_value());
  }

  TEST_CASE("anchors on a box") {
    const BBox b = BBox::of(0, 0, 10, 20);
    CHECK(anchor_point(b, AnchorName::topCenter).x == 5);
    CHECK(anchor_point(b, AnchorName::topCenter).y == 0);
    CHECK(anchor_point(b, AnchorName::bottomRight).y == 20);
  }

  TEST_CASE("primitive bounds") {
    Primitive c;
    c.kind = PrimitiveKind::circle;
    c.attrs = {{"cx", 5.0}, {"cy", 5.0}, {"r", 2.0}};
    const BBox b = primitive_bbox(c);
    CHECK(b.min_x == doctest::Approx(3));
    CHECK(b.max_y == doctest::Approx(7));
    Primitive empty;
    empty.kind = PrimitiveKind::polygon;
    empty.attrs["points"] = Points{};
    CHECK_THROWS(primitive_bbox(empty));
  }

  TEST_CASE("path parsing expands shorthands") {
    const auto segs = parse_path("M0 0 h10 v10 H0 Z");
    REQUIRE(segs.size() == 5);
    CHECK(segs[1].kind == PathSegment::Kind::line);
    CHECK(segs[2].end.y == 10);
    CHECK_THROWS(parse_path("M0 0 X 1"));
  }

  TEST_CASE("transformed path matches transformed samples") {
    const std::string d = "M 0 0 C 5 -20 15 -20 20 0 A 5 5 0 0 1 30 0";
    const AffineMatrix m = compose(AffineMatrix::translation({4, 2}), AffineMatrix::scaling(2, 1));
    const auto moved = sample_path(parse_path(transform_path(d, m)), 8);
    const auto orig = sample_path(parse_path(d), 8);
    REQUIRE(moved.size() == 1);
    CHECK(std::abs(moved[0].front().x - m.apply(orig[0].front()).x) < 1e-9);
    CHECK(std::abs(moved[0].back().x - m.apply(orig[0].back()).x) < 1e-6);
  }
}
