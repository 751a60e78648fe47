#include <string>
#include <utility>
#include <vector>

#include "doctest.h"

#include "ilab/error.hpp"
#include "ilab/finite_dist.hpp"
#include "ilab/rational.hpp"
#include "ilab/value.hpp"

using namespace ilab;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

FiniteDist<int> bern(const Rational& p) { return dist_new<int>({{0, Rational(1) - p}, {1, p}}); }

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ilab::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("rationals are exact and kept in lowest terms") {
  CHECK(q(2, 4) == q(1, 2));
  CHECK(q(2, 4).str() == "1/2");
  CHECK(q(3).str() == "3/1");
  CHECK(q(1, -3).str() == "-1/3");
  CHECK(q(1, 3) + q(1, 6) == q(1, 2));
  CHECK(q(1, 3) * q(3, 7) == q(1, 7));
  CHECK(pow(q(2, 3), 3) == q(8, 27));
  CHECK(Rational::parse("6/8") == q(3, 4));
  CHECK(Rational::parse("-5") == q(-5));
  CHECK_FALSE(Rational::parse("0.5").has_value());
  // Leading zeros are decimal, not octal.
  CHECK(Rational::parse("010") == q(10));
  CHECK(Rational::parse("1/010") == q(1, 10));
  CHECK_FALSE(Rational::parse("1/0").has_value());
  // Far beyond 64 bits: 3^-60 summed 3 times.
  Rational tiny = pow(q(1, 3), 60);
  CHECK(tiny + tiny + tiny == pow(q(1, 3), 59));
}

TEST_CASE("values order numbers, then strings, then tuples") {
  CHECK(Value(1) < Value(q(3, 2)));
  CHECK(Value(q(4, 2)).kind() == Value::Kind::Int);
  CHECK(Value(7) < Value::str("a"));
  CHECK(Value::str("z") < Value::tuple({Value(0)}));
  const Value v = parse_value("(1, 1/2, name, \"two words\", (3))");
  CHECK(v.text() == "(1, 1/2, name, \"two words\", (3))");
  CHECK(parse_value(v.text()) == v);
  CHECK(code_of([] { (void)parse_value("(1, "); }) == ErrorCode::SyntaxError);
}

TEST_CASE("dist_new merges duplicates and insists on unit mass") {
  const auto coin = dist_new<std::string>({{"H", q(1, 2)}, {"T", q(1, 2)}});
  CHECK(coin.size() == 2);
  CHECK(coin.weight("H") == q(1, 2));

  const auto merged = dist_new<std::string>({{"a", q(1, 3)}, {"a", q(1, 3)}, {"b", q(1, 3)}});
  CHECK(merged.weight("a") == q(2, 3));
  CHECK(merged.weight("b") == q(1, 3));

  CHECK(code_of([] { (void)dist_new<std::string>({{"a", q(1, 2)}}); }) == ErrorCode::NonUnitMass);
  CHECK(code_of([] { (void)dist_new<int>({{0, q(3, 2)}, {1, q(-1, 2)}}); }) == ErrorCode::NegativeWeight);
}

TEST_CASE("pushforward") {
  const auto d4 = FiniteDist<int>::uniform({1, 2, 3, 4});
  const auto parity = pushforward(d4, [](int k) { return k % 2 == 0 ? std::string("even") : std::string("odd"); });
  CHECK(parity.weight("even") == q(1, 2));
  CHECK(parity.weight("odd") == q(1, 2));
  CHECK(pushforward(d4, [](int k) { return k; }) == d4);

  const auto pairs = FiniteDist<std::pair<int, int>>::uniform({{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  const auto mx = pushforward(pairs, [](const std::pair<int, int>& p) { return std::max(p.first, p.second); });
  CHECK(mx == dist_new<int>({{1, q(1, 4)}, {2, q(3, 4)}}));
}

TEST_CASE("condition") {
  const auto d4 = FiniteDist<int>::uniform({1, 2, 3, 4});
  CHECK(condition(d4, [](int k) { return k > 2; }) == FiniteDist<int>::uniform({3, 4}));
  CHECK(condition(d4, [](int) { return true; }) == d4);
  const auto ab = FiniteDist<std::string>::uniform({"a", "b"});
  CHECK(code_of([&] { (void)condition(ab, [](const std::string& s) { return s == "c"; }); }) ==
        ErrorCode::ZeroProbabilityEvent);
}

TEST_CASE("product") {
  const auto p = product(bern(q(1, 2)), bern(q(1, 2)));
  CHECK(p.size() == 4);
  for (const auto& [_, w] : p.atoms()) CHECK(w == q(1, 4));
  const auto with_point = product(bern(q(1, 3)), FiniteDist<int>::point(9));
  CHECK(pushforward(with_point, [](const std::pair<int, int>& x) { return x.first; }) == bern(q(1, 3)));
  CHECK(product(bern(q(1, 3)), bern(q(1, 4))).weight({1, 1}) == q(1, 12));
}

TEST_CASE("mix and joint") {
  Kernel<int, std::string> k;
  k[0] = FiniteDist<std::string>::point("r1");
  k[1] = FiniteDist<std::string>::point("r2");
  CHECK(mix(FiniteDist<int>::point(0), k) == k[0]);
  CHECK(mix(bern(q(1, 2)), k) == FiniteDist<std::string>::uniform({"r1", "r2"}));

  Kernel<int, std::string> same;
  same[0] = FiniteDist<std::string>::uniform({"x", "y"});
  same[1] = same[0];
  CHECK(mix(bern(q(1, 2)), same) == same[0]);

  const auto j = joint(bern(q(1, 3)), k);
  CHECK(j.weight({1, "r2"}) == q(1, 3));
  CHECK(pushforward(j, [](const auto& p) { return p.first; }) == bern(q(1, 3)));

  Kernel<int, std::string> partial;
  partial[0] = k[0];
  CHECK(code_of([&] { (void)mix(bern(q(1, 2)), partial); }) == ErrorCode::MissingKernelEntry);
}

TEST_CASE("expectation") {
  CHECK(expectation(bern(q(1, 2)), [](int k) { return Rational(k); }) == q(1, 2));
  CHECK(expectation(FiniteDist<int>::point(7), [](int k) { return Rational(k); }) == q(7));
  CHECK(expectation(dist_new<int>({{0, q(1, 4)}, {2, q(3, 4)}}), [](int k) { return Rational(k); }) == q(3, 2));
}

TEST_CASE("dist_eq and total variation") {
  CHECK(dist_eq(bern(q(1, 2)), bern(q(1, 2))));
  CHECK(total_variation(bern(q(1, 2)), bern(q(1, 2))) == q(0));
  CHECK_FALSE(dist_eq(bern(q(1, 2)), bern(q(1, 3))));
  CHECK(total_variation(bern(q(1, 2)), bern(q(1, 3))) == q(1, 6));
  const auto a = dist_new<int>({{2, q(1, 3)}, {1, q(2, 3)}});
  const auto b = dist_new<int>({{1, q(2, 3)}, {2, q(1, 3)}});
  CHECK(dist_eq(a, b));

  const auto nums = FiniteDist<Value>::point(Value(1));
  const auto tuples = FiniteDist<Value>::point(Value::tuple({Value(1)}));
  CHECK(code_of([&] { (void)dist_eq(nums, tuples); }) == ErrorCode::IncomparableOutcomes);
}

TEST_CASE("support cap") {
  const std::size_t saved = max_support();
  set_max_support(3);
  CHECK(code_of([] { (void)FiniteDist<int>::uniform({1, 2, 3, 4}); }) == ErrorCode::ModelTooLarge);
  set_max_support(saved);
  CHECK(FiniteDist<int>::uniform({1, 2, 3, 4}).size() == 4);
}
