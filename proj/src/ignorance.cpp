#include "ilab/ignorance.hpp"

#include <algorithm>
#include <set>

#include "ilab/error.hpp"

namespace ilab {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_top_level(const std::string& inner) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
  return parts;
}

}  // namespace

RandomVariableRef make_variable(const std::string& raw, const Population& population) {
  const std::string spec = trim(raw);
  if (spec.size() >= 2 && spec.front() == '(' && spec.back() == ')') {
    std::vector<RandomVariableRef> parts;
    for (const auto& p : split_top_level(spec.substr(1, spec.size() - 2))) parts.push_back(make_variable(p, population));
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "empty composite variable");
    std::string name = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? ", " : "") + parts[i].name;
    name += ")";
    return {name, [parts](const WorldState& w) {
              Value::Tuple out;
              out.reserve(parts.size());
              for (const auto& p : parts) out.push_back(p.eval(w));
              return Value::tuple(std::move(out));
            }};
  }
  if (spec == "signal") return {spec, [](const WorldState& w) { return signal_value(w.y); }};
  if (spec == "design_variable") return {spec, [](const WorldState& w) { return w.z; }};
  if (spec == "selection") {
    return {spec, [population](const WorldState& w) { return mapping_labels(w.r, population); }};
  }
  if (spec == "values_on_sample") {
    return {spec, [](const WorldState& w) {
              Value::Tuple out;
              for (std::size_t u : w.r.units) out.emplace_back(w.y.at(u));
              return Value::tuple(std::move(out));
            }};
  }
  if (spec == "indicator") {
    return {spec, [n = population.size()](const WorldState& w) {
              Value::Tuple out;
              for (int i : indicator_vector(w.r, n)) out.emplace_back(i);
              return Value::tuple(std::move(out));
            }};
  }
  if (spec == "constant") return {spec, [](const WorldState&) { return Value(); }};
  if (spec.rfind("unit", 0) == 0 && spec.size() > 4) {
    const auto k = Rational::parse(spec.substr(4));
    if (k && k->is_integer() && k->sign() > 0 && static_cast<std::size_t>(*k->to_int64()) <= population.size()) {
      const std::size_t idx = static_cast<std::size_t>(*k->to_int64()) - 1;
      return {spec, [idx](const WorldState& w) { return Value(w.y.at(idx)); }};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown variable '" + spec + "'");
}

std::string split_status_name(SplitStatus s) {
  switch (s) {
    case SplitStatus::NotComplement:
      return "not_complement";
    case SplitStatus::Complement:
      return "complement";
    case SplitStatus::DistinctComplement:
      return "distinct_complement";
  }
  return {};
}

std::string omega_mode_name(OmegaMode m) { return m == OmegaMode::Product ? "product" : "support_union"; }

std::vector<WorldState> world_space(const Family& family, OmegaMode mode) {
  std::set<WorldState> worlds;
  if (mode == OmegaMode::SupportUnion) {
    for (const auto& member : family.members) {
      for (const auto& [w, _] : member.joint.atoms()) worlds.insert(w);
    }
    return {worlds.begin(), worlds.end()};
  }
  std::set<std::pair<Signal, Value>> yz;
  std::set<SelectionMapping> rs;
  for (const auto& member : family.members) {
    for (const auto& [w, _] : member.joint.atoms()) {
      yz.emplace(w.y, w.z);
      rs.insert(w.r);
    }
  }
  detail::check_support_size(yz.size() * rs.size());
  std::vector<WorldState> out;
  out.reserve(yz.size() * rs.size());
  for (const auto& [y, z] : yz) {
    for (const auto& r : rs) out.push_back(WorldState{y, z, r});
  }
  return out;
}

ProcessSplit::ProcessSplit(std::vector<WorldState> omega, RandomVariableRef v, RandomVariableRef v_bar)
    : omega_(std::move(omega)), v_(std::move(v)), v_bar_(std::move(v_bar)) {
  std::sort(omega_.begin(), omega_.end());
  omega_.erase(std::unique(omega_.begin(), omega_.end()), omega_.end());
  v_values_.reserve(omega_.size());
  v_bar_values_.reserve(omega_.size());
  std::set<Value> vs;
  std::set<Value> vbs;
  bool injective = true;
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    v_values_.push_back(v_.eval(omega_[i]));
    v_bar_values_.push_back(v_bar_.eval(omega_[i]));
    vs.insert(v_values_.back());
    vbs.insert(v_bar_values_.back());
    if (!meet_.emplace(std::pair{v_values_.back(), v_bar_values_.back()}, i).second) injective = false;
  }
  v_image_.assign(vs.begin(), vs.end());
  v_bar_image_.assign(vbs.begin(), vbs.end());
  if (injective) {
    status_ = omega_.size() == v_image_.size() * v_bar_image_.size() ? SplitStatus::DistinctComplement
                                                                      : SplitStatus::Complement;
  }
  for (const auto& vb : v_bar_image_) {
    std::set<Value> reached;
    for (std::size_t i = 0; i < omega_.size(); ++i) {
      if (v_bar_values_[i] == vb) reached.insert(v_values_[i]);
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < omega_.size(); ++i) {
      if (reached.count(v_values_[i])) members.push_back(i);
    }
    phi_.emplace(vb, std::move(members));
  }
}

const std::vector<std::size_t>& ProcessSplit::phi(const Value& v_bar_value) const {
  auto it = phi_.find(v_bar_value);
  if (it == phi_.end()) {
    throw Error(ErrorCode::ValueNotInImage, v_bar_value.text() + " is not a value of " + v_bar_.name);
  }
  return it->second;
}

std::optional<std::size_t> ProcessSplit::meet(const Value& v, const Value& v_bar_value) const {
  auto it = meet_.find({v, v_bar_value});
  if (it == meet_.end()) return std::nullopt;
  return it->second;
}

ProcessSplit classify_split(std::vector<WorldState> omega, RandomVariableRef v, RandomVariableRef v_bar) {
  return ProcessSplit(std::move(omega), std::move(v), std::move(v_bar));
}

bool variation_independent(const RandomVariableRef& h, const RandomVariableRef& h2,
                           const std::vector<WorldState>& omega) {
  std::set<Value> a;
  std::set<Value> b;
  std::set<std::pair<Value, Value>> ab;
  for (const auto& w : omega) {
    Value x = h.eval(w);
    Value y = h2.eval(w);
    a.insert(x);
    b.insert(y);
    ab.emplace(std::move(x), std::move(y));
  }
  return ab.size() == a.size() * b.size();
}

std::vector<WorldState> phi_set(const Value& v_bar_value, const ProcessSplit& split) {
  std::vector<WorldState> out;
  for (std::size_t i : split.phi(v_bar_value)) out.push_back(split.omega()[i]);
  return out;
}

FiniteDist<Value> nuisance_marginal(const FiniteDist<WorldState>& p, const ProcessSplit& split) {
  return pushforward(p, [&](const WorldState& w) { return split.v_bar().eval(w); });
}

namespace {

/// P's weights laid out over split.omega(); P must live on Omega.
std::vector<Rational> weights_on_omega(const FiniteDist<WorldState>& p, const ProcessSplit& split) {
  const auto& omega = split.omega();
  std::vector<Rational> weights(omega.size());
  for (const auto& [w, pw] : p.atoms()) {
    auto it = std::lower_bound(omega.begin(), omega.end(), w);
    if (it == omega.end() || !(*it == w)) {
      throw Error(ErrorCode::InvalidArgument, "distribution charges a world outside Omega");
    }
    weights[static_cast<std::size_t>(it - omega.begin())] = pw;
  }
  return weights;
}

}  // namespace

FiniteDist<WorldState> ignore_with(const FiniteDist<WorldState>& p, const ProcessSplit& split,
                                   const FiniteDist<Value>& nuisance_law) {
  if (split.status() == SplitStatus::NotComplement) {
    throw Error(ErrorCode::NotAComplement, split.v_bar().name + " is not a complement of " + split.v().name);
  }
  const auto weights = weights_on_omega(p, split);
  std::map<Value, Rational> phi_mass;
  for (const auto& vb : split.v_bar_image()) {
    Rational m;
    for (std::size_t i : split.phi(vb)) m += weights[i];
    if (m.is_zero()) throw Error(ErrorCode::ZeroMassPhiSet, "Phi set of " + vb.text() + " has probability zero");
    phi_mass.emplace(vb, m);
  }
  std::vector<std::pair<WorldState, Rational>> pairs;
  for (const auto& [vb, wvb] : nuisance_law.atoms()) {
    const auto& phi = split.phi(vb);
    const Rational& m = phi_mass.at(vb);
    std::map<Value, Rational> v_mass;
    for (std::size_t i : phi) {
      if (!weights[i].is_zero()) v_mass[split.v_of(i)] += weights[i];
    }
    for (const auto& [v, mv] : v_mass) {
      const auto target = split.meet(v, vb);
      if (!target) throw Error(ErrorCode::NotAComplement, "no world with V = " + v.text() + ", Vbar = " + vb.text());
      pairs.emplace_back(split.omega()[*target], wvb * mv / m);
    }
  }
  return FiniteDist<WorldState>::canonical(std::move(pairs));
}

std::string NuisancePolicy::name() const {
  switch (tag) {
    case Tag::DiracFix:
      return "dirac";
    case Tag::SingleArbitrary:
      return "arbitrary";
    case Tag::MarginalFamily:
      return "marginal";
  }
  return {};
}

Family ignore_model(const Family& m, const ProcessSplit& split, const NuisancePolicy& policy) {
  Family out;
  out.model = m.model;
  switch (policy.tag) {
    case NuisancePolicy::Tag::DiracFix:
      for (std::size_t i = 0; i < m.members.size(); ++i) {
        const auto& p = m.members[i];
        for (const auto& vb : split.v_bar_image()) {
          out.members.push_back(Member{p.label + " | vbar=" + vb.text(), p.theta, p.phi, vb, i,
                                       ignore_with(p.joint, split, FiniteDist<Value>::point(vb))});
        }
      }
      break;
    case NuisancePolicy::Tag::SingleArbitrary: {
      FiniteDist<Value> law =
          policy.arbitrary ? *policy.arbitrary : FiniteDist<Value>::uniform(split.v_bar_image());
      for (const auto& [vb, _] : law.atoms()) {
        if (!std::binary_search(split.v_bar_image().begin(), split.v_bar_image().end(), vb)) {
          throw Error(ErrorCode::ValueNotInImage, vb.text() + " is not a value of " + split.v_bar().name);
        }
      }
      for (std::size_t i = 0; i < m.members.size(); ++i) {
        const auto& p = m.members[i];
        out.members.push_back(
            Member{p.label + " | arbitrary", p.theta, p.phi, Value::str("arbitrary"), i, ignore_with(p.joint, split, law)});
      }
      break;
    }
    case NuisancePolicy::Tag::MarginalFamily:
      for (std::size_t i = 0; i < m.members.size(); ++i) {
        const auto& p = m.members[i];
        out.members.push_back(Member{p.label + " | marginal", p.theta, p.phi, Value::str("marginal"), i,
                                     ignore_with(p.joint, split, nuisance_marginal(p.joint, split))});
      }
      break;
  }
  return out;
}

FiniteDist<WorldState> atrandomize(const FiniteDist<WorldState>& p, const ProcessSplit& split) {
  return ignore_with(p, split, nuisance_marginal(p, split));
}

std::string target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Predictand:
      return "predictand";
    case TargetKind::SignalLawFunctional:
      return "signal_law_functional";
    case TargetKind::ModelIndex:
      return "model_index";
  }
  return {};
}

Target builtin_target(const std::string& name) {
  if (name == "theta") return Target{name, TargetKind::SignalLawFunctional, {}, {}};
  if (name == "mean_y1") {
    return Target{name, TargetKind::SignalLawFunctional, {}, [](const FiniteDist<Signal>& py) {
                    return Value(expectation(py, [](const Signal& y) { return Rational(y.at(0)); }));
                  }};
  }
  if (name == "population_mean") {
    return Target{name, TargetKind::Predictand,
                  [](const WorldState& w) {
                    std::int64_t s = 0;
                    for (auto v : w.y) s += v;
                    return Value(Rational(s, static_cast<std::int64_t>(w.y.size())));
                  },
                  {}};
  }
  if (name == "signal") {
    return Target{name, TargetKind::Predictand, [](const WorldState& w) { return signal_value(w.y); }, {}};
  }
  if (name == "model_index") return Target{name, TargetKind::ModelIndex, {}, {}};
  throw Error(ErrorCode::InvalidArgument, "unknown target '" + name + "'");
}

Value theta_value(const SurveyModel& m, std::size_t theta) {
  const auto& g = m.theta_grid.at(theta);
  return g.value ? Value(*g.value) : Value::str(g.label);
}

namespace {

FiniteDist<Signal> theta_signal_law(const SurveyModel& m, std::size_t theta) {
  return pushforward(m.signal_laws.at(theta), [](const SignalZ& yz) { return yz.first; });
}

}  // namespace

TargetValues evaluate_target(const Target& target, const Family& m) {
  TargetValues out{target, {}};
  if (target.kind == TargetKind::Predictand) return out;
  for (std::size_t i = 0; i < m.members.size(); ++i) {
    const auto& member = m.members[i];
    switch (target.kind) {
      case TargetKind::SignalLawFunctional:
        out.per_member.push_back(target.functional ? target.functional(signal_marginal(member))
                                                   : theta_value(*m.model, member.theta));
        break;
      case TargetKind::ModelIndex:
        out.per_member.emplace_back(static_cast<std::int64_t>(i));
        break;
      case TargetKind::Predictand:
        break;
    }
  }
  return out;
}

TargetValues transform_target(const Target& target, const Family& m, const Family& m_star) {
  TargetValues out{target, {}};
  if (target.kind == TargetKind::Predictand) return out;
  const SurveyModel& model = *m.model;
  std::vector<FiniteDist<Signal>> laws;
  if (target.kind == TargetKind::SignalLawFunctional && !target.functional) {
    for (std::size_t t = 0; t < model.theta_grid.size(); ++t) laws.push_back(theta_signal_law(model, t));
  }
  for (const auto& member : m_star.members) {
    if (target.kind == TargetKind::ModelIndex) {
      std::optional<std::size_t> found;
      for (std::size_t i = 0; i < m.members.size() && !found; ++i) {
        if (m.members[i].joint == member.joint) found = i;
      }
      if (!found) {
        throw Error(ErrorCode::TargetNotTransformable,
                    "member '" + member.label + "' of the ignored model is not a member of the original model");
      }
      out.per_member.emplace_back(static_cast<std::int64_t>(*found));
      continue;
    }
    const FiniteDist<Signal> py = signal_marginal(member);
    if (target.functional) {
      out.per_member.push_back(target.functional(py));
      continue;
    }
    // theta as a function of P^Y: the member's own theta when its law is
    // unchanged, otherwise the unique theta whose law matches.
    if (laws.at(member.theta) == py) {
      out.per_member.push_back(theta_value(model, member.theta));
      continue;
    }
    std::vector<std::size_t> matches;
    for (std::size_t t = 0; t < laws.size(); ++t) {
      if (laws[t] == py) matches.push_back(t);
    }
    if (matches.size() != 1) {
      throw Error(ErrorCode::TargetNotTransformable,
                  "the signal law of '" + member.label + "' is not the law of a unique theta");
    }
    out.per_member.push_back(theta_value(model, matches.front()));
  }
  return out;
}

}  // namespace ilab
