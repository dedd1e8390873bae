#include <doctest.h>

#include "gdsl/error.hpp"
#include "gdsl/format.hpp"
#include "gdsl/serialize.hpp"
#include "support.hpp"

using namespace gdsl;

TEST_SUITE("serialize") {
  TEST_CASE("number formatting") {
    CHECK(format_number(1.0, 6) == "1");
    CHECK(format_number(0.1 + 0.2, 6) == "0.3");
    CHECK(format_number(-0.0000001, 6) == "0");
    CHECK(format_number(2.5, 0) == "2");
    CHECK_THROWS_AS(format_number(NAN, 6), Error);
  }

  TEST_CASE("canonical bytes round-trip") {
    for (const char* f : {"garden.ops.json", "operations.ops.json", "snowflake.ops.json", "nl_base.ops.json"}) {
      const std::string bytes = serialize(test::build(f));
      CHECK(serialize(deserialize(bytes)) == bytes);
      CHECK(deserialize(bytes) == deserialize(serialize(deserialize(bytes))));
    }
  }

  TEST_CASE("malformed and invalid input") {
    CHECK_THROWS_AS(deserialize("{"), Error);
    try {
      deserialize(R"({"containers": {"a": {"kind": "blob"}}, "rngSeed": 0, "version": 0})");
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaViolation);
      CHECK(e.field().rfind("/containers/a", 0) == 0);
    }
  }

  TEST_CASE("load_document rejects dangling references") {
    GlyphDocument doc = test::build("garden.ops.json");
    doc.root = ContainerId("ghost");
    CHECK_THROWS_AS(load_document(serialize(doc)), Error);
  }
}
