#pragma once

// Data expressions (`index`, `random()`, + - * /, parentheses) and the
// materialization of data bindings into per-instance values.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gdsl/model.hpp"

namespace gdsl {

// splitmix64: a fixed 64-bit generator so seeded documents render identically
// everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Stream seed for one binding: document seed XOR a stable hash of
// (container id, attribute path).
std::uint64_t binding_seed(std::uint64_t doc_seed, const ContainerId& id,
                           std::string_view attribute_path);

struct Expr {
  enum class Kind { number, index, random, neg, add, sub, mul, div };
  Kind kind = Kind::number;
  double value = 0.0;
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;  // binary ops only
};

// Recursive descent, usual precedence, left associative. Throws SyntaxError
// (field = 1-based column) or UnknownIdentifier.
std::unique_ptr<Expr> parse_expression(std::string_view text);

// Throws DivisionByZero / NonFiniteResult. random() advances `rng` per call.
double eval_expression(const Expr& e, int index, SplitMix64& rng);

// S-expression-ish dump used by tests and explanations, e.g. "(+ (* index 5) random)".
std::string to_debug_string(const Expr& e);

double apply_scale(const LinearScale& s, double v);

struct Materialized {
  std::vector<Scalar> values;
  std::vector<std::string> warnings;
};

// ValueList: cycled or truncated to `count` (with a warning). Expression:
// evaluated at index 0..count-1. The optional scale is applied last.
// Errors: EmptyData, TypeMismatch (scale over strings), expression errors
// carrying the failing index.
Materialized materialize_binding(const DataBinding& b, int count, SplitMix64& rng);

}  // namespace gdsl
