#include <doctest.h>

#include "gdsl/render.hpp"
#include "support.hpp"

using namespace gdsl;

TEST_SUITE("render") {
  TEST_CASE("empty document renders an empty canvas") {
    const std::string svg = render_document(GlyphDocument{});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<g") == std::string::npos);
  }

  TEST_CASE("annotation adds container ids") {
    const GlyphDocument doc = test::build("garden.ops.json");
    SvgConfig cfg;
    CHECK(render_document(doc, cfg).find("data-container-id") == std::string::npos);
    cfg.annotate = true;
    const std::string svg = render_document(doc, cfg);
    CHECK(svg.find("data-container-id=\"green stem\"") != std::string::npos);
    CHECK(svg.find("data-container-id=\"garden\"") != std::string::npos);
  }

  TEST_CASE("decimals and viewBox") {
    const GlyphDocument doc = test::build("snowflake.ops.json");
    SvgConfig cfg;
    cfg.decimals = 2;
    cfg.view_box = std::array<double, 4>{-100, -100, 200, 200};
    const std::string svg = render_document(doc, cfg);
    CHECK(svg.find("viewBox=\"-100 -100 200 200\"") != std::string::npos);
    CHECK(svg.find("8.66025") == std::string::npos);
  }

  TEST_CASE("rendering is deterministic") {
    const GlyphDocument doc = test::build("protein.ops.json", 42);
    SvgConfig cfg;
    cfg.fit = true;
    CHECK(render_document(doc, cfg) == render_document(doc, cfg));
  }
}
