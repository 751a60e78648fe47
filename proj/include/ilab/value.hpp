#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ilab/rational.hpp"

namespace ilab {

/// Structural outcome encoding shared by observations, design variables,
/// target values and nuisance values. Numbers compare numerically (an integral
/// rational is always stored as Int), then strings, then tuples
/// lexicographically. This order is the canonical support order everywhere.
class Value {
 public:
  enum class Kind { Int, Rat, Str, Tuple };
  using Tuple = std::vector<Value>;

  Value() : data_(Tuple{}) {}
  Value(std::int64_t i) : data_(i) {}  // NOLINT(google-explicit-constructor)
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}  // NOLINT(google-explicit-constructor)
  Value(const Rational& r);  // NOLINT(google-explicit-constructor)
  static Value str(std::string s);
  static Value tuple(Tuple items);
  static Value tuple(std::initializer_list<Value> items) { return tuple(Tuple(items)); }

  Kind kind() const;
  bool is_number() const { return kind() == Kind::Int || kind() == Kind::Rat; }
  bool is_tuple() const { return kind() == Kind::Tuple; }

  std::int64_t as_int() const;
  Rational as_rational() const;
  const std::string& as_str() const;
  const Tuple& items() const;
  std::size_t size() const { return items().size(); }
  const Value& operator[](std::size_t i) const { return items()[i]; }

  /// Literal form: 3, 1/2, name, "quoted text", (a, b, (c)).
  std::string text() const;

  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.text(); }

 private:
  std::variant<std::int64_t, Rational, std::string, Tuple> data_;
};

/// Parses the literal form produced by Value::text(). Throws Error(SyntaxError)
/// with a 1-based column on malformed input.
Value parse_value(std::string_view text);

/// Top-level kind family used for comparability checks: numbers, strings, tuples.
int kind_family(const Value& v);

}  // namespace ilab
