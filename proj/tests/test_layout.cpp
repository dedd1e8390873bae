#include <doctest.h>

#include <cmath>

#include "gdsl/error.hpp"
#include "gdsl/layout.hpp"
#include "gdsl/ops.hpp"
#include "support.hpp"

using namespace gdsl;

TEST_SUITE("layout") {
  TEST_CASE("uniform cartesian and polar baselines") {
    Arrangement a;
    a.step = {10, 0};
    CoordinateSystem cart;
    const Transform t = instance_transform(a, cart, 3, {});
    CHECK(t.translate.x == 30);
    Arrangement p;
    p.delta_angle_deg = 90;
    CoordinateSystem polar{CoordKind::polar, {}};
    const AffineMatrix m = to_matrix(instance_transform(p, polar, 1, {}));
    const Vec2 q = m.apply({1, 0});
    CHECK(std::abs(q.x) < 1e-12);
    CHECK(q.y == doctest::Approx(1));
  }

  TEST_CASE("stacked needs the previous bound") {
    Arrangement a;
    a.mode = ArrangementMode::stacked;
    a.gap = 2;
    CHECK_THROWS_AS(instance_transform(a, CoordinateSystem{}, 1, {}), Error);
    const BBox prev = BBox::of(0, 0, 10, 5);
    const BBox own = BBox::of(0, 0, 4, 4);
    const Transform t = instance_transform(a, CoordinateSystem{}, 1, {prev}, {}, &own);
    CHECK(t.translate.x == 12);
  }

  TEST_CASE("top relation puts the source above the target") {
    const GlyphDocument doc = test::build("garden.ops.json");
    const SceneNode s = instantiate_container(doc, ContainerId("flowerWithStem"));
    const BBox flower = node_bbox(s.children.at(0), s.matrix);
    const BBox stem = node_bbox(s.children.at(1), s.matrix);
    CHECK(flower.max_y == doctest::Approx(stem.min_y));
    CHECK(flower.center().x == doctest::Approx(stem.center().x));
  }

  TEST_CASE("per-instance descendant overrides") {
    const GlyphDocument doc = test::build("garden.ops.json");
    const SceneNode s = instantiate(doc);
    REQUIRE(s.children.size() == 6);
    const double h0 = node_bbox(s.children[0].children[1], s.children[0].matrix).height();
    const double h4 = node_bbox(s.children[4].children[1], s.children[4].matrix).height();
    CHECK(h0 == doctest::Approx(60));
    CHECK(h4 == doctest::Approx(120));
  }

  TEST_CASE("empty document gives an empty group") {
    const SceneNode s = instantiate(GlyphDocument{});
    CHECK(s.is_group());
    CHECK(s.children.empty());
  }

  TEST_CASE("seed override changes random bindings") {
    const GlyphDocument doc = test::build("protein.ops.json", 42);
    LayoutOptions a, b;
    b.seed_override = 43;
    const auto la = world_leaves(instantiate(doc, a));
    const auto lb = world_leaves(instantiate(doc, b));
    CHECK(la.size() == lb.size());
    bool differs = false;
    for (std::size_t i = 0; i < la.size(); ++i) differs = differs || !(la[i].world == lb[i].world);
    CHECK(differs);
  }
}
