#include <doctest.h>

#include "gdsl/databind.hpp"
#include "gdsl/error.hpp"

using namespace gdsl;

TEST_SUITE("databind") {
  TEST_CASE("expression precedence") {
    SplitMix64 rng(1);
    CHECK(eval_expression(*parse_expression("1 + 2 * 3"), 0, rng) == 7);
    CHECK(eval_expression(*parse_expression("(1 + 2) * 3"), 0, rng) == 9);
    CHECK(eval_expression(*parse_expression("index * 5 - 1"), 3, rng) == 14);
    CHECK(eval_expression(*parse_expression("-index"), 2, rng) == -2);
    CHECK(to_debug_string(*parse_expression("index * 5 + random()")) == "(+ (* index 5) random)");
  }

  TEST_CASE("expression errors") {
    CHECK_THROWS_AS(parse_expression("1 +"), Error);
    CHECK_THROWS_AS(parse_expression("foo + 1"), Error);
    SplitMix64 rng(1);
    CHECK_THROWS_AS(eval_expression(*parse_expression("1 / (index - 2)"), 2, rng), Error);
  }

  TEST_CASE("random stays in range and is seeded") {
    SplitMix64 a(42), b(42);
    const auto e = parse_expression("0.8 + random() * 0.7");
    for (int i = 0; i < 1000; ++i) {
      const double x = eval_expression(*e, i, a);
      CHECK(x >= 0.8);
      CHECK(x < 1.5);
      CHECK(x == eval_expression(*e, i, b));
    }
  }

  TEST_CASE("value lists cycle with a warning") {
    DataBinding bnd;
    bnd.attribute_path = "instance.primitive.height";
    bnd.source = ValueList{{10.0, 45.0, 30.0}};
    SplitMix64 rng(0);
    auto m = materialize_binding(bnd, 3, rng);
    CHECK(m.values == std::vector<Scalar>{10.0, 45.0, 30.0});
    CHECK(m.warnings.empty());
    m = materialize_binding(bnd, 5, rng);
    CHECK(m.values.size() == 5);
    CHECK(std::get<double>(m.values[3]) == 10);
    CHECK_FALSE(m.warnings.empty());
  }

  TEST_CASE("linear scale") {
    LinearScale s;
    s.domain_hi = 10;
    s.range_hi = 100;
    CHECK(apply_scale(s, 2.5) == doctest::Approx(25));
  }
}
