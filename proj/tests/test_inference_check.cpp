#include <algorithm>

#include "doctest.h"

#include "ilab/catalog.hpp"
#include "ilab/inference_check.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;

namespace {

struct Setup {
  BuiltModel built;
  Family family;
  ProcessSplit split;
};

Setup setup(const std::string& name) {
  BuiltModel built = catalog_model(name);
  Family family = family_of(built.model);
  ProcessSplit split = build_split(built, family);
  return {std::move(built), std::move(family), std::move(split)};
}

Value srs_x(std::vector<std::int64_t> ys, std::vector<std::int64_t> labels) {
  return Value::tuple({int_tuple(ys), int_tuple(labels)});
}

Value table(std::vector<std::pair<Value, Rational>> rows) {
  LikelihoodTable t(rows.begin(), rows.end());
  return table_value(t);
}

}  // namespace

TEST_CASE("names") {
  CHECK(inference_type_name(InferenceType::LikelihoodBased) == "likelihood");
  CHECK(inference_type_name(InferenceType::FrequentistEstimation) == "frequentist");
  CHECK(inference_type_name(InferenceType::Bayesian) == "bayes");
  CHECK(verdict_name(Verdict::Informative) == "informative");
}

TEST_CASE("likelihood of the SRS example") {
  const auto s = setup("srs");
  const auto tv = evaluate_target(builtin_target("mean_y1"), s.family);
  const auto l = likelihood(s.family, tv, s.built.scheme, srs_x({1, 0}, {3, 1}));
  // theta (1 - theta) / 6: the design contributes the constant 1/6.
  CHECK(l.at(Value(q(1, 3))) == q(1, 3) * q(2, 3) / 6);
  CHECK(l.at(Value(q(1, 2))) == q(1, 24));
  CHECK(l.at(Value(q(2, 3))) == q(2, 3) * q(1, 3) / 6);
  // Same shape, impossible value: all-zero row.
  const auto zero = likelihood(s.family, tv, s.built.scheme, srs_x({2, 2}, {1, 2}));
  CHECK(std::all_of(zero.begin(), zero.end(), [](const auto& kv) { return kv.second.is_zero(); }));
  CHECK(thrown_code([&] { likelihood(s.family, tv, s.built.scheme, Value::str("x")); }).second ==
        ErrorCode::UnknownObservation);
  // 4 value pairs times 6 ordered label pairs.
  CHECK(likelihood_tables(s.family, tv, s.built.scheme).size() == 24);
}

TEST_CASE("selection density") {
  const auto s = setup("srs");
  const SelectionDensity g(*s.built.model);
  CHECK(g.g(0, 0, SelectionMapping{{0, 2}}, {1, 0, 1}) == q(1, 6));
  CHECK(g.signal_mass(0, {1, 0, 1}) == q(1, 3) * q(2, 3) * q(1, 3));
  const auto mx = setup("select_max");
  const SelectionDensity gm(*mx.built.model);
  CHECK(gm.g(0, 0, SelectionMapping{{1}}, {1, 2}) == q(1));
  CHECK(gm.g(0, 0, SelectionMapping{{0}}, {1, 2}) == q(0));
}

TEST_CASE("select-max is informative for likelihood inference") {
  const auto s = setup("select_max");
  const auto report = classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::LikelihoodBased,
                               builtin_target("mean_y1"));
  CHECK(report.verdict == Verdict::Informative);
  CHECK_FALSE(report.alpha.has_value());
  REQUIRE(report.witnesses.size() == 1);
  const Witness& w = report.witnesses.front();
  CHECK(w.kind == "likelihood_over_x");
  CHECK(w.at == "target=3/2");
  CHECK(w.left == table({{int_tuple({1}), q(1, 4)}, {int_tuple({2}), q(3, 4)}}));
  CHECK(w.right == table({{int_tuple({1}), q(1, 2)}, {int_tuple({2}), q(1, 2)}}));
  CHECK_FALSE(w.equal);
  CHECK(report.flags.z_contains_y);
  CHECK(report.flags.mar == false);
  CHECK(report.flags.local_vs_uniform == "uniform");
}

TEST_CASE("SRS is ignorable for likelihood, frequentist and Bayesian inference") {
  const auto s = setup("srs");
  const auto target = builtin_target("mean_y1");
  const auto lik = classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::LikelihoodBased, target);
  CHECK(lik.verdict == Verdict::Ignorable);
  // The ignored model fixes the selection, dropping the 1/6 design factor.
  CHECK(lik.alpha == q(6));
  CHECK(lik.flags.mar == true);

  const auto at_x = classify(s.family, s.split, s.built.scheme, srs_x({1, 1}, {2, 3}),
                             InferenceType::LikelihoodBased, target);
  CHECK(at_x.verdict == Verdict::Ignorable);
  CHECK(at_x.alpha == q(6));
  CHECK(at_x.flags.local_vs_uniform == "local");

  const auto freq =
      classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::FrequentistEstimation, target);
  CHECK(freq.verdict == Verdict::Ignorable);
  CHECK(freq.witnesses.size() == 3);

  const auto bayes = classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::Bayesian, target);
  CHECK(bayes.verdict == Verdict::Ignorable);
  CHECK(bayes.witnesses.size() == 24);
}

TEST_CASE("policies agree on the SRS verdict") {
  const auto s = setup("srs");
  for (const auto& policy : {NuisancePolicy::dirac(), NuisancePolicy::single(), NuisancePolicy::marginal()}) {
    ClassifyOptions options;
    options.policy = policy;
    INFO(policy.name());
    const auto r = classify(s.family, s.split, s.built.scheme, srs_x({0, 1}, {1, 2}), InferenceType::LikelihoodBased,
                            builtin_target("mean_y1"), options);
    CHECK(r.verdict == Verdict::Ignorable);
    CHECK(r.flags.policy == policy.name());
  }
}

TEST_CASE("Bernoulli mixture: ignorable conditional laws, informative likelihood") {
  const auto s = setup("bernoulli_mixture");
  // P(T[Y] | T = t) is Bern(theta) for every selection t.
  const auto laws = conditional_law_checks(s.family);
  CHECK(laws.size() == 6);
  for (const auto& w : laws) CHECK(w.equal);

  const auto target = builtin_target("theta");
  const Family star = ignore_model(s.family, s.split, NuisancePolicy::dirac());
  const auto tv = evaluate_target(target, s.family);
  const auto tv_star = transform_target(target, s.family, star);
  const Value x = srs_x({1}, {1});
  const auto cmp = likelihood_equivalent(s.family, star, tv, tv_star, s.built.scheme, x);
  CHECK_FALSE(cmp.equivalent);
  const auto& left = cmp.left.at(x);
  const auto& right = cmp.right.at(x);
  for (const auto& theta : {q(1, 3), q(1, 2)}) {
    // P(T = proj_1, Y_1 = 1) = (theta / 2) theta; the ignored model drops theta / 2.
    CHECK(left.at(Value(theta)) == theta / 2 * theta);
    CHECK(right.at(Value(theta)) == theta);
    CHECK(left.at(Value(theta)) / right.at(Value(theta)) == theta / 2);
  }
  CHECK(check_distinct(*s.built.model) == false);
}

TEST_CASE("distinctness of the grid") {
  const auto make = [](bool diagonal) {
    SurveyModel m;
    m.population = Population::range(1);
    m.theta_grid = {GridPoint{"1/3", q(1, 3)}, GridPoint{"2/3", q(2, 3)}};
    m.phi_grid = {GridPoint{"a", std::nullopt}, GridPoint{"b", std::nullopt}};
    for (const auto& g : m.theta_grid) {
      m.signal_laws.push_back(with_design_variable(iid_signal(bernoulli(*g.value), 1), DesignVariable::None));
    }
    m.designs = {DesignKernel::constant("a", census(1)), DesignKernel::constant("b", census(1))};
    if (diagonal) m.grid = {{0, 0}, {1, 1}};
    m.finalize();
    return m;
  };
  CHECK(check_distinct(make(false)));
  CHECK_FALSE(check_distinct(make(true)));
}

TEST_CASE("missing and observed at random") {
  {
    const auto s = setup("srs");
    CHECK(check_mar(s.family, s.split, s.built.scheme, std::nullopt, MarVariant::Uniform).holds);
    CHECK(check_oar(s.family, s.split, s.built.scheme, std::nullopt, MarVariant::Uniform).holds);
  }
  {
    const auto s = setup("nonresponse_mar");
    const auto mar = check_mar(s.family, s.split, s.built.scheme, std::nullopt, MarVariant::Uniform);
    CHECK(mar.holds);
    CHECK(mar.variant == "uniform");
    // Response of unit 2 depends on the observed y1, so OAR fails.
    const auto oar = check_oar(s.family, s.split, s.built.scheme, std::nullopt, MarVariant::Uniform);
    CHECK_FALSE(oar.holds);
    CHECK_FALSE(oar.detail.empty());
  }
  {
    const auto s = setup("nonresponse_nmar");
    CHECK_FALSE(check_mar(s.family, s.split, s.built.scheme, std::nullopt, MarVariant::Uniform).holds);
    // At an x where unit 2 responded, the only compatible signal has y2 = 1.
    const Value responded = Value::tuple({int_tuple({0, 1}), int_tuple({1, 1})});
    const auto local = check_mar(s.family, s.split, s.built.scheme, responded, MarVariant::Local);
    CHECK(local.holds);
    CHECK(local.variant == "local");
  }
}

TEST_CASE("estimators") {
  const auto mapping = ObservationScheme::values_and_mapping();
  CHECK(builtin_estimator("sample_mean", mapping).fn(srs_x({1, 0}, {1, 2})) == Value(q(1, 2)));
  CHECK(builtin_estimator("sample_mean", mapping).fn(srs_x({}, {})) == Value::str("NA"));
  CHECK(builtin_estimator("first_value", mapping).fn(srs_x({0, 1}, {2, 1})) == Value(0));
  CHECK(builtin_estimator("observation", mapping).fn(Value(7)) == Value(7));
  CHECK(sample_values(srs_x({0, 1}, {2, 1}), mapping) == int_tuple({0, 1}));
  CHECK(thrown_code([&] { builtin_estimator("median", mapping); }).second == ErrorCode::InvalidArgument);
}

TEST_CASE("posteriors") {
  const auto s = setup("srs");
  const auto tv = evaluate_target(builtin_target("theta"), s.family);
  const auto post = posterior(s.family, uniform_prior(s.family), tv, s.built.scheme, srs_x({1, 1}, {1, 2}));
  REQUIRE(post.has_value());
  CHECK(post->weight(Value(q(1, 3))) == q(4, 29));
  CHECK(post->weight(Value(q(1, 2))) == q(9, 29));
  CHECK(post->weight(Value(q(2, 3))) == q(16, 29));
  CHECK_FALSE(posterior(s.family, uniform_prior(s.family), tv, s.built.scheme, srs_x({2, 2}, {1, 2})).has_value());

  const Family star = ignore_model(s.family, s.split, NuisancePolicy::dirac());
  const auto tv_star = transform_target(builtin_target("theta"), s.family, star);
  const auto q_star = induced_prior(s.family, uniform_prior(s.family), star, s.split, NuisancePolicy::dirac());
  CHECK(q_star.size() == star.members.size());
  CHECK(sum(q_star) == q(1));
  CHECK(thrown_code([&] {
          posterior_equivalent(s.family, star, {uniform_prior(s.family)}, {q_star}, tv, tv_star, s.built.scheme,
                               srs_x({2, 2}, {1, 2}));
        }).second == ErrorCode::ZeroEvidence);
  const auto cmp = posterior_equivalent(s.family, star, {uniform_prior(s.family)}, {q_star}, tv, tv_star,
                                        s.built.scheme, srs_x({1, 1}, {1, 2}));
  CHECK(cmp.equivalent);
}

TEST_CASE("classification reports compare structurally") {
  const auto s = setup("stratified");
  const auto a = classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::LikelihoodBased,
                          builtin_target("mean_y1"));
  const auto b = classify(s.family, s.split, s.built.scheme, std::nullopt, InferenceType::LikelihoodBased,
                          builtin_target("mean_y1"));
  CHECK(a == b);
  CHECK(a.verdict == Verdict::Ignorable);
  CHECK(a.alpha == q(8));
}
