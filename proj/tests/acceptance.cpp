// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ilab/catalog.hpp"
#include "ilab/inference_check.hpp"
#include "ilab/kernels.hpp"
#include "ilab/model_document.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "ilab/report.hpp"
#include "ilab/rubin_audit.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_ms;
  std::function<Outcome()> run;
};

Value table(std::vector<std::pair<Value, Rational>> rows) { return table_value(LikelihoodTable(rows.begin(), rows.end())); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome indicator_and_count() {
  Outcome o;
  const Population u = Population::range(8);
  const auto r = mapping_from_labels(u, {3, 1, 5, 3, 2});
  o.require(indicator_vector(r, 8) == std::vector<int>{1, 1, 1, 0, 1, 0, 0, 0}, "indicator vector");
  o.require(count_vector(r, 8) == std::vector<std::size_t>{1, 1, 2, 0, 1, 0, 0, 0}, "count vector");
  return o;
}

Outcome size_identities() {
  Outcome o;
  const auto designs = size_identity_designs(5);
  for (const auto& d : designs) {
    o.require(sum(inclusion_probabilities(d.design, d.population_size)) == expected_distinct_size(d.design),
              "sum pi != E|distinct| for " + d.name);
    o.require(sum(selection_expectations(d.design, d.population_size)) == expected_size(d.design),
              "sum upsilon != E n for " + d.name);
  }
  if (o.pass) o.detail = std::to_string(designs.size()) + " designs";
  return o;
}

Outcome select_max_informative() {
  Outcome o;
  const auto b = catalog_model("select_max");
  const Family f = family_of(b.model);
  const auto obs = observation_distribution(*b.model, 0, 0, b.scheme);
  const auto expected_obs = dist_new<Value>({{int_tuple({1}), q(1, 4)}, {int_tuple({2}), q(3, 4)}});
  o.require(obs == expected_obs, "observation law is " + dist_value(obs).text());
  const auto y1 = pushforward(signal_marginal(f.members[0]), [](const Signal& y) { return int_tuple({y[0]}); });
  o.require(y1 == dist_new<Value>({{int_tuple({1}), q(1, 2)}, {int_tuple({2}), q(1, 2)}}), "one-unit marginal");
  const auto r = classify(f, build_split(b, f), b.scheme, std::nullopt, InferenceType::LikelihoodBased,
                          builtin_target("mean_y1"));
  o.require(r.verdict == Verdict::Informative, "verdict is " + verdict_name(r.verdict));
  o.require(r.witnesses.size() == 1, "expected one witness");
  if (!r.witnesses.empty()) {
    const auto& w = r.witnesses.front();
    o.require(w.left == table({{int_tuple({1}), q(1, 4)}, {int_tuple({2}), q(3, 4)}}) &&
                  w.right == table({{int_tuple({1}), q(1, 2)}, {int_tuple({2}), q(1, 2)}}) && !w.equal,
              "witness pair " + w.left.text() + " vs " + w.right.text());
  }
  return o;
}

Outcome srs_ignorable() {
  Outcome o;
  const auto b = catalog_model("srs");
  const Family f = family_of(b.model);
  const auto split = build_split(b, f);
  const auto target = builtin_target("mean_y1");
  const auto lik = classify(f, split, b.scheme, std::nullopt, InferenceType::LikelihoodBased, target);
  o.require(lik.verdict == Verdict::Ignorable, "likelihood verdict informative");
  // alpha is 1 once the design's constant factor P(r) = 1/6 is divided out.
  const Rational design_factor = srs_wor(2, 3).atoms().front().second;
  o.require(lik.alpha.has_value() && *lik.alpha * design_factor == q(1),
            "alpha " + (lik.alpha ? lik.alpha->str() : std::string("absent")));
  const auto freq = classify(f, split, b.scheme, std::nullopt, InferenceType::FrequentistEstimation, target);
  o.require(freq.verdict == Verdict::Ignorable, "frequentist verdict informative");
  if (o.pass) o.detail = "alpha = " + lik.alpha->str() + " = 1 / P(r)";
  return o;
}

Outcome bernoulli_mixture() {
  Outcome o;
  const auto b = catalog_model("bernoulli_mixture");
  const Family f = family_of(b.model);
  for (const auto& member : f.members) {
    const Rational theta = *b.model->theta_grid.at(member.theta).value;
    for (std::size_t unit = 0; unit < 2; ++unit) {
      const SelectionMapping proj{{unit}};
      const auto given = condition(member.joint, [&](const WorldState& w) { return w.r == proj; });
      const auto law = pushforward(given, [&](const WorldState& w) { return w.y[unit]; });
      o.require(law == bernoulli(theta), "P(T[Y] | T = proj) is not Bern(theta) at " + member.label);
    }
  }
  const auto split = build_split(b, f);
  const Family star = ignore_model(f, split, NuisancePolicy::dirac());
  const auto target = builtin_target("theta");
  const auto tv = evaluate_target(target, f);
  const auto tv_star = transform_target(target, f, star);
  const Value x = Value::tuple({int_tuple({1}), int_tuple({1})});
  const auto cmp = likelihood_equivalent(f, star, tv, tv_star, b.scheme, x);
  o.require(!cmp.equivalent, "likelihoods are equivalent at " + x.text());
  for (const auto& g : b.model->theta_grid) {
    const Rational theta = *g.value;
    const Rational l = cmp.left.at(x).at(Value(theta));
    const Rational r = cmp.right.at(x).at(Value(theta));
    o.require(l == theta / 2 * theta && r == theta, "tables at theta = " + theta.str());
  }
  if (o.pass) o.detail = "L/L* = theta/2 at x = " + x.text();
  return o;
}

Outcome rubin_sweep() {
  Outcome o;
  const auto jobs = rubin_sweep_family();
  const auto audits = kernels::rubin_sweep(jobs);
  std::size_t records = 0;
  std::size_t iff_62 = 0;
  for (const auto& a : audits) {
    records += a.records.size();
    iff_62 += a.counterexamples("6.2");
    for (const char* t : {"6.1", "6.3", "7.1", "7.2"}) {
      o.require(a.counterexamples(t) == 0, std::string("counterexample to ") + t + " in " + a.name);
    }
  }
  if (o.pass) {
    o.detail = std::to_string(jobs.size()) + " models, " + std::to_string(records) + " observations; 6.2 (iff) mismatches: " +
               std::to_string(iff_62);
  }
  return o;
}

Outcome distinctness() {
  Outcome o;
  const auto make = [](bool diagonal) {
    SurveyModel m;
    m.population = Population::range(1);
    m.theta_grid = {GridPoint{"1/3", q(1, 3)}, GridPoint{"2/3", q(2, 3)}};
    m.phi_grid = {GridPoint{"1/3", q(1, 3)}, GridPoint{"2/3", q(2, 3)}};
    for (const auto& g : m.theta_grid) {
      m.signal_laws.push_back(with_design_variable(iid_signal(bernoulli(*g.value), 1), DesignVariable::None));
    }
    for (const auto& g : m.phi_grid) m.designs.push_back(DesignKernel::constant(g.label, poisson({*g.value})));
    if (diagonal) m.grid = {{0, 0}, {1, 1}};
    m.finalize();
    return m;
  };
  o.require(check_distinct(make(false)), "product grid not distinct");
  o.require(!check_distinct(make(true)), "diagonal grid distinct");
  return o;
}

Outcome atrandomize_algebra() {
  Outcome o;
  std::size_t distinct = 0;
  std::size_t three = 0;
  for (const auto& c : atrandomize_cases()) {
    const auto once = atrandomize(c.p, c.split);
    o.require(nuisance_marginal(once, c.split) == nuisance_marginal(c.p, c.split), "nuisance law moved: " + c.name);
    if (c.split.status() == SplitStatus::DistinctComplement) {
      ++distinct;
      o.require(atrandomize(once, c.split) == once, "not idempotent: " + c.name);
      o.require(once == product_construction(c.p, c.split), "differs from the product: " + c.name);
    } else {
      ++three;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(distinct) + " distinct cases idempotent and product; " + std::to_string(three) +
               " 3-point cases keep P^Vbar";
  }
  return o;
}

Outcome mc_calibration() {
  Outcome o;
  constexpr std::uint64_t kDraws = 100000;
  constexpr std::uint64_t kSeed = 20240601;
  std::size_t cells = 0;
  std::size_t outside = 0;
  for (const auto& e : example_catalog()) {
    const auto b = catalog_model(e.name);
    for (const auto& [theta, phi] : b.model->grid) {
      const auto first = compare_exact_vs_mc(*b.model, theta, phi, b.scheme, kDraws, kSeed);
      const auto again = compare_exact_vs_mc(*b.model, theta, phi, b.scheme, kDraws, kSeed);
      o.require(emit_json(to_json(first)) == emit_json(to_json(again)), "report not reproducible: " + e.name);
      cells += first.cells.size();
      outside += first.outside();
    }
  }
  o.require(outside * 100 <= cells, std::to_string(outside) + " of " + std::to_string(cells) + " cells outside");
  if (o.pass) o.detail = std::to_string(outside) + " of " + std::to_string(cells) + " cells outside 3-sigma";
  return o;
}

Outcome parser_corpus() {
  Outcome o;
  std::size_t valid = 0;
  std::size_t invalid = 0;
  const fs::path root(ILAB_TEST_DATA_DIR);
  for (const auto& e : fs::directory_iterator(root / "valid")) {
    if (e.path().extension() != ".model") continue;
    ++valid;
    const std::string text = slurp(e.path());
    const auto d = parse_model(text);
    o.require(emit_model(d) == text && parse_model(emit_model(d)) == d, "round trip: " + e.path().filename().string());
  }
  for (const auto& e : fs::directory_iterator(root / "invalid")) {
    if (e.path().extension() != ".model") continue;
    ++invalid;
    bool located = false;
    try {
      build_model(parse_model_file(e.path().string()));
    } catch (const DocumentError& err) {
      located = err.where().line > 0 && err.where().column > 0;
    } catch (const Error&) {
    }
    o.require(located, "no located diagnostic: " + e.path().filename().string());
  }
  o.require(valid >= 10 && invalid >= 10, "corpus too small");
  if (o.pass) o.detail = std::to_string(valid) + " valid, " + std::to_string(invalid) + " invalid";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "indicator and count vectors of r = (3,1,5,3,2)", 1, indicator_and_count},
      {2, "size identities, N <= 5", 10000, size_identities},
      {3, "select-max is informative", 1000, select_max_informative},
      {4, "SRS is ignorable", 1000, srs_ignorable},
      {5, "Bernoulli mixture: ignorable conditional laws, informative likelihood", 1000, bernoulli_mixture},
      {6, "Rubin audit soundness sweep", 60000, rubin_sweep},
      {7, "distinctness detection", 1, distinctness},
      {8, "atrandomize algebra", 1000, atrandomize_algebra},
      {9, "Monte Carlo calibration and reproducibility", 30000, mc_calibration},
      {10, "parser golden corpus", 1000, parser_corpus},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && ms > c.budget_ms) {
      o.pass = false;
      o.detail = "over the time budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d  %-72s %10.2f ms / %.0f ms  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), ms,
                c.budget_ms, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
