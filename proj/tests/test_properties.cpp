// Randomized properties over seeded generators. Each case draws a fixed
// number of instances from std::mt19937_64 with a constant seed, so failures
// reproduce exactly.

#include <random>

#include "doctest.h"

#include "ilab/catalog.hpp"
#include "ilab/inference_check.hpp"
#include "ilab/model_build.hpp"
#include "ilab/model_document.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;

namespace {

using Rng = std::mt19937_64;

std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

/// Random positive weights over `outcomes`, normalized exactly.
template <class T>
FiniteDist<T> random_dist(Rng& rng, const std::vector<T>& outcomes) {
  std::vector<std::int64_t> raw;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    raw.push_back(pick(rng, 1, 9));
    total += raw.back();
  }
  std::vector<std::pair<T, Rational>> pairs;
  for (std::size_t i = 0; i < outcomes.size(); ++i) pairs.emplace_back(outcomes[i], Rational(raw[i], total));
  return FiniteDist<T>::from_pairs(pairs);
}

Rational random_probability(Rng& rng) {
  const std::int64_t den = pick(rng, 1, 6);
  return Rational(pick(rng, 0, den), den);
}

std::string random_term(Rng& rng, std::size_t n_units, int depth) {
  switch (pick(rng, 0, depth > 0 ? 5 : 3)) {
    case 0:
      return "census";
    case 1:
      return "srs_wor(" + std::to_string(pick(rng, 0, static_cast<std::int64_t>(n_units))) + ")";
    case 2: {
      std::string out = "poisson(";
      for (std::size_t k = 0; k < n_units; ++k) out += (k ? ", " : "") + Value(random_probability(rng)).text();
      return out + ")";
    }
    case 3:
      return "fixed(" + std::to_string(pick(rng, 1, static_cast<std::int64_t>(n_units))) + ")";
    case 4:
      return "srs_wr(" + std::to_string(pick(rng, 1, 2)) + ")";
    default: {
      const std::int64_t a = pick(rng, 1, 5);
      return "mix(" + Value(Rational(a, 6)).text() + ": " + random_term(rng, n_units, depth - 1) + ", " +
             Value(Rational(6 - a, 6)).text() + ": " + random_term(rng, n_units, depth - 1) + ")";
    }
  }
}

/// A random y-free model in canonical text.
std::string random_model_text(Rng& rng, std::size_t n_units, const std::string& scheme) {
  std::string theta;
  const std::int64_t points = pick(rng, 1, 3);
  std::set<Rational> seen;
  while (static_cast<std::int64_t>(seen.size()) < points) seen.insert(Rational(pick(rng, 1, 5), 6));
  for (const auto& t : seen) theta += (theta.empty() ? "" : ", ") + Value(t).text();
  return "[population]\nsize = " + std::to_string(n_units) +
         "\n\n[signal]\nalphabet = 0, 1\nlaw = bernoulli\n\n[grid]\ntheta = " + theta +
         "\n\n[design]\nvariant = " + random_term(rng, n_units, 2) + "\n\n[observation]\nscheme = " + scheme + "\n";
}

}  // namespace

TEST_CASE("distribution combinators preserve unit mass") {
  Rng rng(1);
  for (int iter = 0; iter < 200; ++iter) {
    const auto a = random_dist<int>(rng, {0, 1, 2, 3});
    const auto b = random_dist<int>(rng, {5, 6});
    CHECK(pushforward(a, [](int x) { return x % 2; }).total_mass() == q(1));
    CHECK(product(a, b).total_mass() == q(1));
    CHECK(pushforward(product(a, b), [](const auto& p) { return p.first; }) == a);
    CHECK(pushforward(product(a, b), [](const auto& p) { return p.second; }) == b);
    const auto even = condition(a, [](int x) { return x % 2 == 0; });
    CHECK(even.total_mass() == q(1));
    CHECK(even.weight(0) * a.mass([](int x) { return x % 2 == 0; }) == a.weight(0));
    Kernel<int, int> k;
    for (int x : {0, 1, 2, 3}) k[x] = random_dist<int>(rng, {x, x + 10});
    CHECK(mix(a, k).total_mass() == q(1));
    CHECK(pushforward(joint(a, k), [](const auto& p) { return p.first; }) == a);
    const auto c = random_dist<int>(rng, {0, 1, 2, 3});
    CHECK(total_variation(a, c) == total_variation(c, a));
    CHECK(total_variation(a, c) <= q(1));
    CHECK(total_variation(a, a) == q(0));
  }
}

TEST_CASE("size identities on random Poisson and mixture designs") {
  Rng rng(2);
  for (int iter = 0; iter < 150; ++iter) {
    const std::size_t n_units = static_cast<std::size_t>(pick(rng, 1, 5));
    std::vector<Rational> p;
    for (std::size_t k = 0; k < n_units; ++k) p.push_back(random_probability(rng));
    const std::size_t n = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(n_units)));
    const Rational w(pick(rng, 0, 4), 4);
    const auto mixed = mixture_design({{w, Rational(1) - w}}, {DesignKernel::constant("p", poisson(p)),
                                                               DesignKernel::constant("s", srs_wr(n, n_units))});
    for (const Design& d : {poisson(p), mixed.front()(Value())}) {
      CHECK(sum(inclusion_probabilities(d, n_units)) == expected_distinct_size(d));
      CHECK(sum(selection_expectations(d, n_units)) == expected_size(d));
    }
    CHECK(inclusion_probabilities(poisson(p), n_units) == p);
  }
}

TEST_CASE("random documents round-trip and build") {
  Rng rng(3);
  for (int iter = 0; iter < 100; ++iter) {
    const std::string text = random_model_text(rng, static_cast<std::size_t>(pick(rng, 1, 3)), "values_and_mapping");
    INFO(text);
    const ModelDocument d = parse_model(text);
    CHECK(emit_model(d) == text);
    CHECK(parse_model(emit_model(d)) == d);
    const BuiltModel b = build_model(d);
    for (const auto& [t, phi] : b.model->grid) {
      CHECK(observation_distribution(*b.model, t, phi, b.scheme).total_mass() == q(1));
    }
  }
}

TEST_CASE("designs free of (y, theta) are likelihood-ignorable at every observation") {
  // Per x the design contributes a constant factor, so a local alpha exists.
  // One alpha for every x at once exists only when that factor is the same
  // for all selections (equal-probability designs).
  Rng rng(4);
  for (int iter = 0; iter < 25; ++iter) {
    const std::string text = random_model_text(rng, static_cast<std::size_t>(pick(rng, 1, 3)), "values_and_mapping");
    INFO(text);
    const BuiltModel b = build_model(parse_model(text));
    const Family f = family_of(b.model);
    const auto split = build_split(b, f);
    const auto law = observation_distribution(*b.model, 0, 0, b.scheme);
    for (std::size_t i = 0; i < law.size(); i += 1 + law.size() / 4) {
      const Value& x = law.atoms()[i].first;
      INFO(x.text());
      const auto r = classify(f, split, b.scheme, x, InferenceType::LikelihoodBased, builtin_target("theta"));
      CHECK(r.verdict == Verdict::Ignorable);
      CHECK(r.flags.mar == true);
    }
  }
}

TEST_CASE("atrandomize on random distinct splits") {
  Rng rng(5);
  const Population one = Population::range(1);
  // Omega = {0, 1, 2} x {out, in}: a distinct complement.
  std::vector<WorldState> omega;
  for (std::int64_t y = 0; y < 3; ++y) {
    for (bool d : {false, true}) omega.push_back(tiny_world(y, d));
  }
  const auto split = classify_split(omega, make_variable("signal", one), make_variable("selection", one));
  REQUIRE(split.status() == SplitStatus::DistinctComplement);
  for (int iter = 0; iter < 100; ++iter) {
    const auto p = random_dist<WorldState>(rng, omega);
    const auto once = atrandomize(p, split);
    CHECK(atrandomize(once, split) == once);
    CHECK(once == product_construction(p, split));
    // V and Vbar laws are kept; they become independent.
    CHECK(nuisance_marginal(once, split) == nuisance_marginal(p, split));
  }
}

TEST_CASE("simulation reports are reproducible per seed") {
  Rng rng(6);
  const auto& catalog = example_catalog();
  for (int iter = 0; iter < 10; ++iter) {
    const auto& entry = catalog[static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(catalog.size()) - 1))];
    const auto b = catalog_model(entry.name);
    const auto [theta, phi] = b.model->grid.front();
    const std::uint64_t seed = rng();
    INFO(entry.name << " seed " << seed);
    const auto first = compare_exact_vs_mc(*b.model, theta, phi, b.scheme, 2000, seed);
    CHECK(compare_exact_vs_mc(*b.model, theta, phi, b.scheme, 2000, seed) == first);
  }
}
