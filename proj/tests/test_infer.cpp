#include <doctest.h>

#include <cmath>

#include "gdsl/error.hpp"
#include "gdsl/infer.hpp"
#include "gdsl/layout.hpp"
#include "gdsl/render.hpp"
#include "support.hpp"

using namespace gdsl;

namespace {

std::vector<FlatElement> squares(const std::vector<AffineMatrix>& placements) {
  std::vector<FlatElement> out;
  for (const auto& m : placements) {
    FlatElement e;
    e.primitive.kind = PrimitiveKind::rect;
    e.primitive.attrs = {{"x", 0.0}, {"y", 0.0}, {"width", 10.0}, {"height", 4.0}, {"fill", std::string("#000000")}};
    e.world = m;
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_SUITE("infer") {
  TEST_CASE("import reads the supported subset") {
    const auto elems = import_svg(R"svg(<svg xmlns="http://www.w3.org/2000/svg"><title>t</title>
      <g transform="translate(10,0)"><rect x="0" y="0" width="5" height="5" style="fill:red"/></g>
      <circle cx="1" cy="2" r="3" fill="rgb(0,0,255)"/></svg>)svg");
    REQUIRE(elems.size() == 2);
    CHECK(elems[0].world.e == doctest::Approx(10));
    CHECK(std::get<std::string>(elems[0].primitive.attrs.at("fill")) == "#ff0000");
    CHECK(std::get<std::string>(elems[1].primitive.attrs.at("fill")) == "#0000ff");
  }

  TEST_CASE("import errors") {
    CHECK_THROWS_AS(import_svg("<svg"), Error);
    try {
      import_svg(R"(<svg><ellipse cx="0" cy="0" rx="1" ry="2"/></svg>)");
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedElement);
      CHECK(e.field() == "ellipse");
    }
    try {
      import_svg("<svg></svg>");
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyInput);
    }
  }

  TEST_CASE("translation fit") {
    std::vector<AffineMatrix> ms;
    for (int i : {3, 0, 2, 1}) ms.push_back(AffineMatrix::translation({5.0 + 12.0 * i, 7.0}));
    const FitResult f = fit_transform_chain(squares(ms));
    CHECK(f.model == FitModel::translation);
    CHECK(std::abs(f.step.x) == doctest::Approx(12));
    CHECK(f.step.y == doctest::Approx(0).epsilon(1e-9));
  }

  TEST_CASE("rotation fit") {
    std::vector<AffineMatrix> ms;
    for (int i = 0; i < 5; ++i) {
      ms.push_back(compose(AffineMatrix::translation({50, 40}),
                           compose(AffineMatrix::rotation_deg(72.0 * i), AffineMatrix::translation({20, 0}))));
    }
    const FitResult f = fit_transform_chain(squares(ms));
    CHECK(f.model == FitModel::rotation);
    CHECK(f.center.x == doctest::Approx(50));
    CHECK(f.center.y == doctest::Approx(40));
    CHECK(std::abs(f.delta_angle_deg) == doctest::Approx(72));
  }

  TEST_CASE("two scaled copies keep their own origin") {
    const auto elems = squares({AffineMatrix::translation({3, 4}),
                                compose(AffineMatrix::translation({23, 4}), AffineMatrix::scaling(1.5, 1.5))});
    const FitResult f = fit_transform_chain(elems);
    CHECK(f.model == FitModel::translationScale);
    CHECK(f.scale_origin.x == doctest::Approx(3));
    CHECK(f.scale_origin.y == doctest::Approx(4));
    CHECK(f.step.x == doctest::Approx(20));
    CHECK(f.step.y == doctest::Approx(0).epsilon(1e-9));
  }

  TEST_CASE("unrelated shapes stay apart") {
    auto elems = squares({AffineMatrix::identity(), AffineMatrix::translation({30, 0})});
    FlatElement c;
    c.primitive.kind = PrimitiveKind::circle;
    c.primitive.attrs = {{"cx", 0.0}, {"cy", 0.0}, {"r", 4.0}};
    elems.push_back(c);
    const auto groups = group_by_signature(elems);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].size() == 2);
  }

  TEST_CASE("rendered flower reduces to one repeater") {
    const GlyphDocument src = test::build("flower12.ops.json");
    const GlyphDocument inferred = infer_structure(flatten_scene(instantiate(src)));
    const auto& root = inferred.containers.at(*inferred.root);
    CHECK(count_leaves(instantiate(inferred)) == 12);
    bool has_repeater = std::holds_alternative<RepeaterBody>(root.body);
    if (!has_repeater) {
      for (const auto& [id, c] : inferred.containers) has_repeater = has_repeater || std::holds_alternative<RepeaterBody>(c.body);
    }
    CHECK(has_repeater);
    CHECK_THROWS_AS(infer_structure({}), Error);
  }
}
