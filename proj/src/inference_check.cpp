#include "ilab/inference_check.hpp"

#include <algorithm>

#include "ilab/error.hpp"
#include "ilab/kernels.hpp"

namespace ilab {

std::string inference_type_name(InferenceType t) {
  switch (t) {
    case InferenceType::LikelihoodBased:
      return "likelihood";
    case InferenceType::FrequentistEstimation:
      return "frequentist";
    case InferenceType::Bayesian:
      return "bayes";
  }
  return {};
}

std::string verdict_name(Verdict v) { return v == Verdict::Ignorable ? "ignorable" : "informative"; }

namespace {

using Laws = std::vector<FiniteDist<kernels::ObsTarget>>;

/// Structural skeleton of an observation: number / string / tuple arity.
Value shape_of(const Value& v) {
  switch (kind_family(v)) {
    case 0:
      return Value::str("number");
    case 1:
      return Value::str("string");
    default: {
      Value::Tuple out;
      for (const auto& item : v.items()) out.push_back(shape_of(item));
      return Value::tuple(std::move(out));
    }
  }
}

std::set<Value> target_keys(const TargetValues& tv, const Laws& laws) {
  std::set<Value> keys;
  if (!tv.per_member.empty()) {
    keys.insert(tv.per_member.begin(), tv.per_member.end());
    return keys;
  }
  for (const auto& law : laws) {
    for (const auto& [xt, _] : law.atoms()) keys.insert(xt.second);
  }
  return keys;
}

std::set<Value> observation_support(const Laws& laws) {
  std::set<Value> xs;
  for (const auto& law : laws) {
    for (const auto& [xt, _] : law.atoms()) xs.insert(xt.first);
  }
  return xs;
}

void check_known(const Value& x, const std::set<Value>& support) {
  if (support.count(x)) return;
  const Value want = shape_of(x);
  for (const auto& y : support) {
    if (shape_of(y) == want) return;
  }
  throw Error(ErrorCode::UnknownObservation, "observation " + x.text() + " is not in the observation alphabet");
}

LikelihoodTable table_at(const Laws& laws, const std::set<Value>& keys, const Value& x) {
  LikelihoodTable t;
  for (const auto& k : keys) t.emplace(k, Rational(0));
  for (const auto& law : laws) {
    for (const auto& [xt, w] : law.atoms()) {
      if (!(xt.first == x)) continue;
      auto& cell = t[xt.second];
      if (w > cell) cell = w;
    }
  }
  return t;
}

std::map<Value, LikelihoodTable> tables_for(const Laws& laws, const std::set<Value>& keys, const std::set<Value>& xs) {
  std::map<Value, LikelihoodTable> out;
  for (const auto& x : xs) {
    auto& t = out[x];
    for (const auto& k : keys) t.emplace(k, Rational(0));
  }
  for (const auto& law : laws) {
    for (const auto& [xt, w] : law.atoms()) {
      auto it = out.find(xt.first);
      if (it == out.end()) continue;
      auto& cell = it->second[xt.second];
      if (w > cell) cell = w;
    }
  }
  return out;
}

/// Observation of a world under design phi; pi is looked up only when needed.
class Observer {
 public:
  Observer(const SurveyModel& m, const ObservationScheme& s) : m_(m), s_(s) {}
  Value operator()(const WorldState& w, std::size_t phi) {
    if (s_.tag != SchemeTag::ValuesAndSampledWeights) return observe(w, s_, m_.population);
    auto key = std::pair{phi, w.z};
    auto it = pi_.find(key);
    if (it == pi_.end()) {
      it = pi_.emplace(key, inclusion_probabilities(m_.designs.at(phi)(w.z), m_.population.size())).first;
    }
    return observe(w, s_, m_.population, &it->second);
  }

 private:
  const SurveyModel& m_;
  const ObservationScheme& s_;
  std::map<std::pair<std::size_t, Value>, std::vector<Rational>> pi_;
};

std::vector<std::size_t> phis_in_grid(const SurveyModel& m) {
  std::set<std::size_t> phis;
  for (const auto& [t, p] : m.grid) phis.insert(p);
  return {phis.begin(), phis.end()};
}

std::vector<std::size_t> thetas_with(const SurveyModel& m, std::size_t phi) {
  std::vector<std::size_t> out;
  for (const auto& [t, p] : m.grid) {
    if (p == phi) out.push_back(t);
  }
  return out;
}

std::string signal_text(const Signal& y) { return signal_value(y).text(); }

}  // namespace

LikelihoodTable likelihood(const Family& m, const TargetValues& tv, const ObservationScheme& s, const Value& x) {
  const Laws laws = kernels::observed_laws(m, tv, s);
  check_known(x, observation_support(laws));
  return table_at(laws, target_keys(tv, laws), x);
}

std::map<Value, LikelihoodTable> likelihood_tables(const Family& m, const TargetValues& tv,
                                                   const ObservationScheme& s) {
  const Laws laws = kernels::observed_laws(m, tv, s);
  return tables_for(laws, target_keys(tv, laws), observation_support(laws));
}

SelectionDensity::SelectionDensity(const SurveyModel& m) : m_(m) {
  for (const auto& law : m.signal_laws) {
    std::map<Signal, Rational> mass;
    for (const auto& [yz, w] : law.atoms()) mass[yz.first] += w;
    std::map<Signal, std::vector<std::pair<Value, Rational>>> given;
    for (const auto& [yz, w] : law.atoms()) given[yz.first].emplace_back(yz.second, w / mass.at(yz.first));
    signal_mass_.push_back(std::move(mass));
    z_given_y_.push_back(std::move(given));
  }
}

Rational SelectionDensity::signal_mass(std::size_t theta, const Signal& y) const {
  const auto& mass = signal_mass_.at(theta);
  auto it = mass.find(y);
  return it == mass.end() ? Rational(0) : it->second;
}

Rational SelectionDensity::g(std::size_t theta, std::size_t phi, const SelectionMapping& t, const Signal& y) const {
  const auto& given = z_given_y_.at(theta);
  auto it = given.find(y);
  if (it == given.end()) {
    throw Error(ErrorCode::ZeroProbabilityEvent, "selection density at a signal of probability zero");
  }
  Rational total;
  for (const auto& [z, pz] : it->second) {
    auto key = std::pair{phi, z};
    auto d = design_cache_.find(key);
    if (d == design_cache_.end()) d = design_cache_.emplace(key, m_.designs.at(phi)(z)).first;
    total += pz * d->second.weight(t);
  }
  return total;
}

namespace {

std::set<Value> positive_observations(const Family& m, const ObservationScheme& s) {
  std::set<Value> xs;
  for (const auto& member : m.members) {
    const auto law = observation_distribution(m, member, s);
    for (const auto& [x, _] : law.atoms()) xs.insert(x);
  }
  return xs;
}

/// Selections compatible with x under design phi, each with its compatible signals.
std::map<SelectionMapping, std::set<Signal>> compatible(const ProcessSplit& split, Observer& obs, std::size_t phi,
                                                        const Value& x) {
  std::map<SelectionMapping, std::set<Signal>> out;
  for (const auto& w : split.omega()) {
    if (obs(w, phi) == x) out[w.r].insert(w.y);
  }
  return out;
}

std::string mar_at(const SurveyModel& model, const ProcessSplit& split, const ObservationScheme& s, const Value& x,
                   const SelectionDensity& g) {
  Observer obs(model, s);
  for (std::size_t phi : phis_in_grid(model)) {
    const auto thetas = thetas_with(model, phi);
    for (const auto& [t, ys] : compatible(split, obs, phi, x)) {
      std::optional<Rational> c;
      Signal first;
      for (std::size_t theta : thetas) {
        for (const auto& y : ys) {
          if (g.signal_mass(theta, y).is_zero()) continue;
          const Rational gy = g.g(theta, phi, t, y);
          if (!c) {
            c = gy;
            first = y;
          } else if (gy != *c) {
            return "x=" + x.text() + " " + model.phi_grid[phi].label + " t=" +
                   mapping_labels(t, model.population).text() + ": g=" + c->str() + " at y=" + signal_text(first) +
                   " but g=" + gy.str() + " at y=" + signal_text(y);
          }
        }
      }
    }
  }
  return {};
}

std::string oar_at(const SurveyModel& model, const ProcessSplit& split, const ObservationScheme& s, const Value& x,
                   const SelectionDensity& g) {
  Observer obs(model, s);
  std::set<Signal> signals;
  for (const auto& w : split.omega()) signals.insert(w.y);
  for (std::size_t phi : phis_in_grid(model)) {
    const auto thetas = thetas_with(model, phi);
    for (const auto& [t, ys] : compatible(split, obs, phi, x)) {
      const auto in_sample = indicator_vector(t, model.population.size());
      auto unobserved = [&](const Signal& y) {
        Signal u;
        for (std::size_t k = 0; k < y.size(); ++k) {
          if (!in_sample[k]) u.push_back(y[k]);
        }
        return u;
      };
      std::set<Signal> parts;
      for (const auto& y : ys) parts.insert(unobserved(y));
      for (const auto& u : parts) {
        std::optional<Rational> c;
        Signal first;
        for (std::size_t theta : thetas) {
          for (const auto& y : signals) {
            if (unobserved(y) != u || g.signal_mass(theta, y).is_zero()) continue;
            const Rational gy = g.g(theta, phi, t, y);
            if (!c) {
              c = gy;
              first = y;
            } else if (gy != *c) {
              return "x=" + x.text() + " t=" + mapping_labels(t, model.population).text() + ": g=" + c->str() +
                     " at y=" + signal_text(first) + " but g=" + gy.str() + " at y=" + signal_text(y);
            }
          }
        }
      }
    }
  }
  return {};
}

ConditionCheck run_condition(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                             const std::optional<Value>& x, MarVariant variant,
                             std::string (*at)(const SurveyModel&, const ProcessSplit&, const ObservationScheme&,
                                               const Value&, const SelectionDensity&)) {
  const SurveyModel& model = *m.model;
  SelectionDensity g(model);
  ConditionCheck out;
  if (variant == MarVariant::Local && x) {
    out.variant = "local";
    out.detail = at(model, split, s, *x, g);
  } else {
    out.variant = "uniform";
    for (const auto& xi : positive_observations(m, s)) {
      out.detail = at(model, split, s, xi, g);
      if (!out.detail.empty()) break;
    }
  }
  out.holds = out.detail.empty();
  return out;
}

}  // namespace

ConditionCheck check_mar(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                         const std::optional<Value>& x, MarVariant variant) {
  return run_condition(m, split, s, x, variant, &mar_at);
}

ConditionCheck check_oar(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                         const std::optional<Value>& x, MarVariant variant) {
  return run_condition(m, split, s, x, variant, &oar_at);
}

bool check_distinct(const SurveyModel& m) {
  std::set<std::size_t> thetas;
  std::set<std::size_t> phis;
  for (const auto& [t, p] : m.grid) {
    thetas.insert(t);
    phis.insert(p);
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs(m.grid.begin(), m.grid.end());
  return pairs.size() == thetas.size() * phis.size();
}

namespace {

struct Proportionality {
  bool ok = true;
  std::optional<Rational> alpha;
  std::optional<Value> x;
  std::optional<Value> target;
};

/// One alpha across every (x, tau) cell of the given tables.
Proportionality proportional(const std::map<Value, LikelihoodTable>& left,
                             const std::map<Value, LikelihoodTable>& right) {
  Proportionality p;
  for (const auto& [x, lt] : left) {
    const auto& rt = right.at(x);
    for (const auto& [tau, l] : lt) {
      const Rational& r = rt.at(tau);
      if (l.is_zero() && r.is_zero()) continue;
      if (l.is_zero() || r.is_zero()) {
        p.ok = false;
      } else {
        const Rational ratio = r / l;
        if (!p.alpha) {
          p.alpha = ratio;
        } else if (ratio != *p.alpha) {
          p.ok = false;
        }
      }
      if (!p.ok) {
        p.x = x;
        p.target = tau;
        p.alpha.reset();
        return p;
      }
    }
  }
  if (!p.alpha) p.alpha = Rational(1);
  return p;
}

}  // namespace

LikelihoodComparison likelihood_equivalent(const Family& m, const Family& m_star, const TargetValues& tv,
                                           const TargetValues& tv_star, const ObservationScheme& s,
                                           const std::optional<Value>& x) {
  const Laws laws = kernels::observed_laws(m, tv, s);
  const Laws laws_star = kernels::observed_laws(m_star, tv_star, s);
  const auto keys = target_keys(tv, laws);
  const auto keys_star = target_keys(tv_star, laws_star);
  if (keys.empty() || keys_star.empty()) throw Error(ErrorCode::EmptyTables, "a likelihood table has no target values");

  LikelihoodComparison out;
  std::set<Value> xs;
  if (x) {
    auto support = observation_support(laws);
    const auto support_star = observation_support(laws_star);
    support.insert(support_star.begin(), support_star.end());
    check_known(*x, support);
    xs.insert(*x);
    out.mode = "local";
  } else {
    xs = observation_support(laws);
    const auto more = observation_support(laws_star);
    xs.insert(more.begin(), more.end());
    out.mode = "uniform";
  }
  out.left = tables_for(laws, keys, xs);
  out.right = tables_for(laws_star, keys_star, xs);
  if (keys != keys_star) {
    out.equivalent = false;
    out.reason = "the target takes different values in the two models";
    return out;
  }
  const Proportionality p = proportional(out.left, out.right);
  out.equivalent = p.ok;
  out.alpha = p.alpha;
  out.violating_x = p.x;
  out.violating_target = p.target;
  if (!p.ok) out.reason = "likelihoods are not proportional";
  return out;
}

Value sample_values(const Value& x, const ObservationScheme& s) {
  switch (s.tag) {
    case SchemeTag::ValuesOnly:
      return x;
    case SchemeTag::ValuesAndMapping:
    case SchemeTag::ValuesMappingDesign:
    case SchemeTag::ValuesAndIndicator:
      return x[0];
    case SchemeTag::ValuesAndSampledWeights: {
      Value::Tuple out;
      for (const auto& pair : x.items()) out.push_back(pair[0]);
      return Value::tuple(std::move(out));
    }
    case SchemeTag::Custom:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "estimators need an observation scheme that carries the drawn values");
}

Estimator builtin_estimator(const std::string& name, const ObservationScheme& s) {
  if (name == "observation") return {name, [](const Value& x) { return x; }};
  if (s.tag == SchemeTag::Custom) {
    throw Error(ErrorCode::InvalidArgument, "estimator '" + name + "' needs the drawn values; use 'observation'");
  }
  if (name == "sample_values") return {name, [s](const Value& x) { return sample_values(x, s); }};
  if (name == "first_value") {
    return {name, [s](const Value& x) {
              const Value v = sample_values(x, s);
              return v.size() == 0 ? Value::str("NA") : v[0];
            }};
  }
  if (name == "sample_mean") {
    return {name, [s](const Value& x) {
              const Value v = sample_values(x, s);
              if (v.size() == 0) return Value::str("NA");
              Rational total;
              for (const auto& item : v.items()) total += item.as_rational();
              return Value(total / Rational(static_cast<std::int64_t>(v.size())));
            }};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + name + "'");
}

namespace {

std::map<Value, DistSet> estimator_laws(const Laws& laws, const TargetValues& tv, const Estimator& est) {
  std::map<Value, DistSet> out;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    if (!tv.per_member.empty()) {
      out[tv.per_member[i]].insert(pushforward(laws[i], [&](const kernels::ObsTarget& xt) { return est.fn(xt.first); }));
      continue;
    }
    std::set<Value> taus;
    for (const auto& [xt, _] : laws[i].atoms()) taus.insert(xt.second);
    for (const auto& tau : taus) {
      const auto cond = condition(laws[i], [&](const kernels::ObsTarget& xt) { return xt.second == tau; });
      out[tau].insert(pushforward(cond, [&](const kernels::ObsTarget& xt) { return est.fn(xt.first); }));
    }
  }
  return out;
}

}  // namespace

FrequentistComparison sampling_dist_equivalent(const Family& m, const Family& m_star, const Estimator& est,
                                               const TargetValues& tv, const TargetValues& tv_star,
                                               const ObservationScheme& s) {
  FrequentistComparison out;
  out.left = estimator_laws(kernels::observed_laws(m, tv, s), tv, est);
  out.right = estimator_laws(kernels::observed_laws(m_star, tv_star, s), tv_star, est);
  out.equivalent = out.left == out.right;
  if (!out.equivalent) {
    std::set<Value> taus;
    for (const auto& [t, _] : out.left) taus.insert(t);
    for (const auto& [t, _] : out.right) taus.insert(t);
    for (const auto& t : taus) {
      auto l = out.left.find(t);
      auto r = out.right.find(t);
      if (l == out.left.end() || r == out.right.end() || l->second != r->second) {
        out.violating_target = t;
        break;
      }
    }
  }
  return out;
}

Prior uniform_prior(const Family& f) {
  return Prior(f.members.size(), Rational(1, static_cast<std::int64_t>(f.members.size())));
}

Prior induced_prior(const Family& m, const Prior& q, const Family& m_star, const ProcessSplit& split,
                    const NuisancePolicy& policy) {
  Prior out(m_star.members.size());
  if (policy.tag != NuisancePolicy::Tag::DiracFix) {
    for (std::size_t j = 0; j < m_star.members.size(); ++j) out[j] = q.at(m_star.members[j].origin);
    return out;
  }
  std::map<Value, Rational> q_prime;
  for (std::size_t i = 0; i < m.members.size(); ++i) {
    if (q.at(i).is_zero()) continue;
    const auto nuisance = nuisance_marginal(m.members[i].joint, split);
    for (const auto& [vb, w] : nuisance.atoms()) q_prime[vb] += q[i] * w;
  }
  for (std::size_t j = 0; j < m_star.members.size(); ++j) {
    const auto& member = m_star.members[j];
    auto it = q_prime.find(*member.nuisance);
    out[j] = it == q_prime.end() ? Rational(0) : q.at(member.origin) * it->second;
  }
  return out;
}

Prior product_prior(const Prior& q, const FiniteDist<Value>& nuisance_prior, const Family& m_star) {
  Prior out(m_star.members.size());
  for (std::size_t j = 0; j < m_star.members.size(); ++j) {
    const auto& member = m_star.members[j];
    if (!member.nuisance) throw Error(ErrorCode::InvalidArgument, "nuisance priors need a Dirac-ignored family");
    out[j] = q.at(member.origin) * nuisance_prior.weight(*member.nuisance);
  }
  return out;
}

namespace {

std::optional<FiniteDist<Value>> posterior_from(const Laws& laws, const Prior& q, const Value& x) {
  if (q.size() != laws.size()) throw Error(ErrorCode::InvalidArgument, "prior size differs from the family size");
  std::vector<std::pair<Value, Rational>> pairs;
  Rational evidence;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    if (q[i].is_zero()) continue;
    for (const auto& [xt, w] : laws[i].atoms()) {
      if (!(xt.first == x)) continue;
      pairs.emplace_back(xt.second, q[i] * w);
      evidence += q[i] * w;
    }
  }
  if (evidence.is_zero()) return std::nullopt;
  for (auto& [_, w] : pairs) w /= evidence;
  return FiniteDist<Value>::canonical(std::move(pairs));
}

DistSet posterior_set(const Laws& laws, const std::vector<Prior>& priors, const Value& x) {
  DistSet out;
  for (const auto& q : priors) {
    if (auto post = posterior_from(laws, q, x)) out.insert(std::move(*post));
  }
  return out;
}

}  // namespace

std::optional<FiniteDist<Value>> posterior(const Family& m, const Prior& q, const TargetValues& tv,
                                           const ObservationScheme& s, const Value& x) {
  return posterior_from(kernels::observed_laws(m, tv, s), q, x);
}

BayesComparison posterior_equivalent(const Family& m, const Family& m_star, const std::vector<Prior>& priors,
                                     const std::vector<Prior>& priors_star, const TargetValues& tv,
                                     const TargetValues& tv_star, const ObservationScheme& s, const Value& x) {
  BayesComparison out;
  out.x = x;
  out.left = posterior_set(kernels::observed_laws(m, tv, s), priors, x);
  out.right = posterior_set(kernels::observed_laws(m_star, tv_star, s), priors_star, x);
  if (out.left.empty() && out.right.empty()) {
    throw Error(ErrorCode::ZeroEvidence, "observation " + x.text() + " has zero evidence under every prior");
  }
  out.equivalent = out.left == out.right;
  return out;
}

Value dist_value(const FiniteDist<Value>& d) {
  Value::Tuple out;
  for (const auto& [o, w] : d.atoms()) out.push_back(Value::tuple({o, Value(w)}));
  return Value::tuple(std::move(out));
}

Value table_value(const LikelihoodTable& t) {
  Value::Tuple out;
  for (const auto& [k, w] : t) out.push_back(Value::tuple({k, Value(w)}));
  return Value::tuple(std::move(out));
}

namespace {

Value set_value(const DistSet& set) {
  Value::Tuple out;
  for (const auto& d : set) out.push_back(dist_value(d));
  return Value::tuple(std::move(out));
}

bool witness_eq(const Witness& a, const Witness& b) {
  return a.kind == b.kind && a.at == b.at && a.left == b.left && a.right == b.right && a.equal == b.equal;
}

bool witnesses_eq(const std::vector<Witness>& a, const std::vector<Witness>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), witness_eq);
}

/// Per-target slices over x in the uniform likelihood mode.
std::vector<Witness> likelihood_slices(const LikelihoodComparison& cmp) {
  std::optional<Rational> alpha = cmp.alpha;
  if (!alpha) {
    // The first cell with both sides positive fixes the reference ratio.
    for (const auto& [x, lt] : cmp.left) {
      for (const auto& [tau, l] : lt) {
        const Rational& r = cmp.right.at(x).at(tau);
        if (!l.is_zero() && !r.is_zero() && !alpha) alpha = r / l;
      }
    }
  }
  std::map<Value, std::pair<LikelihoodTable, LikelihoodTable>> slices;
  for (const auto& [x, lt] : cmp.left) {
    for (const auto& [tau, l] : lt) slices[tau].first[x] = l;
  }
  for (const auto& [x, rt] : cmp.right) {
    for (const auto& [tau, r] : rt) slices[tau].second[x] = r;
  }
  std::vector<Witness> out;
  for (const auto& [tau, lr] : slices) {
    bool equal = cmp.equivalent;
    if (!equal) {
      equal = alpha.has_value() && lr.first.size() == lr.second.size();
      for (const auto& [x, l] : lr.first) {
        auto it = lr.second.find(x);
        if (!equal || it == lr.second.end() || it->second != *alpha * l) {
          equal = false;
          break;
        }
      }
    }
    out.push_back(Witness{"likelihood_over_x", "target=" + tau.text(), table_value(lr.first),
                          table_value(lr.second), equal});
  }
  return out;
}

}  // namespace

bool operator==(const ClassificationReport& a, const ClassificationReport& b) {
  return a.inference_type == b.inference_type && a.verdict == b.verdict && a.target == b.target &&
         a.observation == b.observation && a.x == b.x && a.alpha == b.alpha && witnesses_eq(a.witnesses, b.witnesses) &&
         witnesses_eq(a.conditional_laws, b.conditional_laws) && a.flags.z_contains_y == b.flags.z_contains_y &&
         a.flags.non_separated_grid == b.flags.non_separated_grid &&
         a.flags.local_vs_uniform == b.flags.local_vs_uniform && a.flags.policy == b.flags.policy &&
         a.flags.omega == b.flags.omega && a.flags.split_status == b.flags.split_status &&
         a.flags.mar_variant == b.flags.mar_variant && a.flags.mar == b.flags.mar;
}

std::vector<Witness> conditional_law_checks(const Family& m) {
  std::vector<Witness> out;
  for (const auto& member : m.members) {
    const auto py = signal_marginal(member);
    const auto selections = pushforward(member.joint, [](const WorldState& w) { return w.r; });
    for (const auto& [t, _] : selections.atoms()) {
      const auto given = condition(member.joint, [&](const WorldState& w) { return w.r == t; });
      auto drawn = [&](const Signal& y) {
        Value::Tuple v;
        for (std::size_t u : t.units) v.emplace_back(y.at(u));
        return Value::tuple(std::move(v));
      };
      const auto left = pushforward(given, [&](const WorldState& w) { return drawn(w.y); });
      const auto right = pushforward(py, drawn);
      out.push_back(Witness{"conditional_law",
                            member.label + " t=" + mapping_labels(t, m.model->population).text(), dist_value(left),
                            dist_value(right), left == right});
    }
  }
  return out;
}

ClassificationReport classify(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                              const std::optional<Value>& x, InferenceType type, const Target& target,
                              const ClassifyOptions& options) {
  const SurveyModel& model = *m.model;
  const Family m_star = ignore_model(m, split, options.policy);
  const TargetValues tv = evaluate_target(target, m);
  const TargetValues tv_star = transform_target(target, m, m_star);

  ClassificationReport report;
  report.inference_type = type;
  report.target = target.name;
  report.observation = s.name();
  report.x = x;
  report.flags.z_contains_y = model.z_contains_y;
  report.flags.non_separated_grid = !check_distinct(model);
  report.flags.local_vs_uniform = x ? "local" : "uniform";
  report.flags.policy = options.policy.name();
  report.flags.omega = omega_mode_name(options.omega);
  report.flags.split_status = split_status_name(split.status());

  switch (type) {
    case InferenceType::LikelihoodBased: {
      const auto cmp = likelihood_equivalent(m, m_star, tv, tv_star, s, x);
      if (x) {
        report.witnesses.push_back(Witness{"likelihood", "x=" + x->text(), table_value(cmp.left.at(*x)),
                                           table_value(cmp.right.at(*x)), cmp.equivalent});
      } else {
        report.witnesses = likelihood_slices(cmp);
      }
      if (!cmp.reason.empty() && !cmp.equivalent && cmp.reason != "likelihoods are not proportional") {
        report.witnesses.push_back(Witness{"target_codomain", cmp.reason, Value(), Value(), false});
      }
      if (cmp.equivalent) report.alpha = cmp.alpha;
      break;
    }
    case InferenceType::FrequentistEstimation: {
      const auto est = builtin_estimator(options.estimator, s);
      const auto cmp = sampling_dist_equivalent(m, m_star, est, tv, tv_star, s);
      std::set<Value> taus;
      for (const auto& [t, _] : cmp.left) taus.insert(t);
      for (const auto& [t, _] : cmp.right) taus.insert(t);
      for (const auto& t : taus) {
        auto l = cmp.left.find(t);
        auto r = cmp.right.find(t);
        const DistSet none;
        const DistSet& ls = l == cmp.left.end() ? none : l->second;
        const DistSet& rs = r == cmp.right.end() ? none : r->second;
        report.witnesses.push_back(
            Witness{"estimator_laws", "target=" + t.text() + " estimator=" + est.name, set_value(ls), set_value(rs),
                    l != cmp.left.end() && r != cmp.right.end() && ls == rs});
      }
      break;
    }
    case InferenceType::Bayesian: {
      std::vector<Prior> priors = options.priors;
      if (priors.empty()) priors.push_back(uniform_prior(m));
      std::vector<Prior> priors_star;
      for (const auto& q : priors) {
        if (options.nuisance_priors.empty()) {
          priors_star.push_back(induced_prior(m, q, m_star, split, options.policy));
        } else {
          for (const auto& qn : options.nuisance_priors) priors_star.push_back(product_prior(q, qn, m_star));
        }
      }
      std::vector<Value> xs;
      if (x) {
        xs.push_back(*x);
      } else {
        std::set<Value> all = positive_observations(m, s);
        const auto more = positive_observations(m_star, s);
        all.insert(more.begin(), more.end());
        xs.assign(all.begin(), all.end());
      }
      for (const auto& xi : xs) {
        BayesComparison cmp;
        try {
          cmp = posterior_equivalent(m, m_star, priors, priors_star, tv, tv_star, s, xi);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::ZeroEvidence && !x) continue;
          throw;
        }
        report.witnesses.push_back(
            Witness{"posteriors", "x=" + xi.text(), set_value(cmp.left), set_value(cmp.right), cmp.equivalent});
      }
      break;
    }
  }

  const bool informative =
      std::any_of(report.witnesses.begin(), report.witnesses.end(), [](const Witness& w) { return !w.equal; });
  report.verdict = informative ? Verdict::Informative : Verdict::Ignorable;
  if (informative) report.alpha.reset();

  const MarVariant mar_variant = x ? options.mar_variant : MarVariant::Uniform;
  const auto mar = check_mar(m, split, s, x, mar_variant);
  report.flags.mar = mar.holds;
  report.flags.mar_variant = mar.variant;
  report.conditional_laws = conditional_law_checks(m);
  return report;
}

}  // namespace ilab
