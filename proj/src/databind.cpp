#include "gdsl/databind.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "gdsl/error.hpp"

namespace gdsl {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t binding_seed(std::uint64_t doc_seed, const ContainerId& id,
                           std::string_view attribute_path) {
  std::string key = id.str();
  key.push_back('\0');
  key.append(attribute_path);
  return doc_seed ^ fnv1a64(key);
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::unique_ptr<Expr> parse() {
    auto e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  std::unique_ptr<Expr> parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        lhs = binary(Expr::Kind::add, std::move(lhs), parse_product());
      } else if (accept('-')) {
        lhs = binary(Expr::Kind::sub, std::move(lhs), parse_product());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Expr> parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        lhs = binary(Expr::Kind::mul, std::move(lhs), parse_unary());
      } else if (accept('/')) {
        lhs = binary(Expr::Kind::div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Expr> parse_unary() {
    skip_ws();
    if (accept('-')) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::neg;
      e->lhs = parse_unary();
      return e;
    }
    if (accept('+')) return parse_unary();
    return parse_primary();
  }

  std::unique_ptr<Expr> parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      auto e = parse_sum();
      skip_ws();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string name(text_.substr(start, pos_ - start));
      auto e = std::make_unique<Expr>();
      if (name == "index") {
        e->kind = Expr::Kind::index;
        return e;
      }
      if (name == "random") {
        skip_ws();
        if (!accept('(')) fail("expected '(' after random");
        skip_ws();
        if (!accept(')')) fail("random() takes no arguments");
        e->kind = Expr::Kind::random;
        return e;
      }
      throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + name + "'", name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::unique_ptr<Expr> parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
      } else {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    std::string lexeme(text_.substr(start, pos_ - start));
    if (lexeme == ".") {
      pos_ = start;
      fail("malformed number");
    }
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::number;
    e->value = std::strtod(lexeme.c_str(), nullptr);
    return e;
  }

  static std::unique_ptr<Expr> binary(Expr::Kind k, std::unique_ptr<Expr> l,
                                      std::unique_ptr<Expr> r) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const std::string column = std::to_string(pos_ + 1);
    throw Error(ErrorCode::SyntaxError, msg + " at column " + column, column);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double checked(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteResult, "expression is not finite");
  return v;
}

std::string scalar_repr(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::unique_ptr<Expr> parse_expression(std::string_view text) { return Parser(text).parse(); }

double eval_expression(const Expr& e, int index, SplitMix64& rng) {
  switch (e.kind) {
    case Expr::Kind::number: return e.value;
    case Expr::Kind::index: return static_cast<double>(index);
    case Expr::Kind::random: return rng.uniform();
    case Expr::Kind::neg: return -eval_expression(*e.lhs, index, rng);
    case Expr::Kind::add:
      return checked(eval_expression(*e.lhs, index, rng) + eval_expression(*e.rhs, index, rng));
    case Expr::Kind::sub:
      return checked(eval_expression(*e.lhs, index, rng) - eval_expression(*e.rhs, index, rng));
    case Expr::Kind::mul:
      return checked(eval_expression(*e.lhs, index, rng) * eval_expression(*e.rhs, index, rng));
    case Expr::Kind::div: {
      const double num = eval_expression(*e.lhs, index, rng);
      const double den = eval_expression(*e.rhs, index, rng);
      if (den == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero");
      return checked(num / den);
    }
  }
  return 0.0;
}

std::string to_debug_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: return scalar_repr(e.value);
    case Expr::Kind::index: return "index";
    case Expr::Kind::random: return "random";
    case Expr::Kind::neg: return "(neg " + to_debug_string(*e.lhs) + ")";
    case Expr::Kind::add: return "(+ " + to_debug_string(*e.lhs) + " " + to_debug_string(*e.rhs) + ")";
    case Expr::Kind::sub: return "(- " + to_debug_string(*e.lhs) + " " + to_debug_string(*e.rhs) + ")";
    case Expr::Kind::mul: return "(* " + to_debug_string(*e.lhs) + " " + to_debug_string(*e.rhs) + ")";
    case Expr::Kind::div: return "(/ " + to_debug_string(*e.lhs) + " " + to_debug_string(*e.rhs) + ")";
  }
  return "?";
}

double apply_scale(const LinearScale& s, double v) {
  if (v == s.domain_lo) return s.range_lo;
  if (v == s.domain_hi) return s.range_hi;
  return s.range_lo + (v - s.domain_lo) * (s.range_hi - s.range_lo) / (s.domain_hi - s.domain_lo);
}

Materialized materialize_binding(const DataBinding& b, int count, SplitMix64& rng) {
  if (count < 1) throw Error(ErrorCode::BadValue, "count must be >= 1", b.attribute_path);
  Materialized out;
  out.values.reserve(static_cast<std::size_t>(count));

  if (const auto* list = std::get_if<ValueList>(&b.source)) {
    if (list->values.empty()) {
      throw Error(ErrorCode::EmptyData, "no values bound to '" + b.attribute_path + "'",
                  b.attribute_path);
    }
    const auto n = list->values.size();
    for (int i = 0; i < count; ++i) out.values.push_back(list->values[static_cast<std::size_t>(i) % n]);
    if (n != static_cast<std::size_t>(count)) {
      out.warnings.push_back("LengthMismatch: '" + b.attribute_path + "' has " +
                             std::to_string(n) + " values for " + std::to_string(count) +
                             " instances (" + (n < static_cast<std::size_t>(count) ? "cycled" : "truncated") +
                             ")");
    }
  } else {
    const auto& text = std::get<Expression>(b.source).text;
    std::unique_ptr<Expr> expr;
    try {
      expr = parse_expression(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadExpression, e.detail(), b.attribute_path);
    }
    for (int i = 0; i < count; ++i) {
      try {
        out.values.emplace_back(eval_expression(*expr, i, rng));
      } catch (const Error& e) {
        throw Error(e.code(), e.detail() + " at index " + std::to_string(i), b.attribute_path,
                    static_cast<std::size_t>(i));
      }
    }
  }

  if (b.scale) {
    for (auto& v : out.values) {
      const auto* d = std::get_if<double>(&v);
      if (!d) {
        throw Error(ErrorCode::TypeMismatch, "a linear scale needs numeric data",
                    b.attribute_path);
      }
      v = apply_scale(*b.scale, *d);
    }
  }
  return out;
}

}  // namespace gdsl
