#include "ilab/sampling_model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ilab/error.hpp"

namespace ilab {

Population::Population(std::vector<Value> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "a population needs at least one unit");
  std::set<Value> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate unit label " + l.text());
  }
}

Population Population::range(std::size_t n) {
  std::vector<Value> labels;
  labels.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) labels.emplace_back(static_cast<std::int64_t>(k));
  return Population(std::move(labels));
}

std::size_t Population::index_of(const Value& label) const {
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == label) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "no unit labeled " + label.text());
}

bool SelectionMapping::injective() const {
  std::vector<std::size_t> sorted = units;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

SelectionMapping mapping_from_labels(const Population& population, const std::vector<Value>& labels) {
  SelectionMapping r;
  r.units.reserve(labels.size());
  for (const auto& l : labels) r.units.push_back(population.index_of(l));
  return r;
}

Value mapping_labels(const SelectionMapping& r, const Population& population) {
  Value::Tuple out;
  out.reserve(r.n());
  for (std::size_t u : r.units) out.push_back(population.label(u));
  return Value::tuple(std::move(out));
}

Value signal_value(const Signal& y) {
  Value::Tuple out;
  out.reserve(y.size());
  for (auto v : y) out.emplace_back(v);
  return Value::tuple(std::move(out));
}

Signal signal_from_value(const Value& v) {
  Signal y;
  for (const auto& item : v.items()) y.push_back(item.as_int());
  return y;
}

Value world_value(const WorldState& w, const Population& population) {
  return Value::tuple({signal_value(w.y), w.z, mapping_labels(w.r, population)});
}

std::vector<int> indicator_vector(const SelectionMapping& r, std::size_t population_size) {
  std::vector<int> out(population_size, 0);
  for (std::size_t u : r.units) out.at(u) = 1;
  return out;
}

std::vector<std::size_t> count_vector(const SelectionMapping& r, std::size_t population_size) {
  std::vector<std::size_t> out(population_size, 0);
  for (std::size_t u : r.units) ++out.at(u);
  return out;
}

std::vector<Rational> inclusion_probabilities(const Design& design, std::size_t population_size) {
  std::vector<Rational> pi(population_size);
  for (const auto& [r, w] : design.atoms()) {
    const auto ind = indicator_vector(r, population_size);
    for (std::size_t k = 0; k < population_size; ++k) {
      if (ind[k]) pi[k] += w;
    }
  }
  return pi;
}

std::vector<Rational> selection_expectations(const Design& design, std::size_t population_size) {
  std::vector<Rational> upsilon(population_size);
  for (const auto& [r, w] : design.atoms()) {
    const auto cnt = count_vector(r, population_size);
    for (std::size_t k = 0; k < population_size; ++k) {
      if (cnt[k]) upsilon[k] += w * Rational(static_cast<std::int64_t>(cnt[k]));
    }
  }
  return upsilon;
}

Rational expected_distinct_size(const Design& design) {
  return expectation(design, [](const SelectionMapping& r) {
    std::set<std::size_t> image(r.units.begin(), r.units.end());
    return Rational(static_cast<std::int64_t>(image.size()));
  });
}

Rational expected_size(const Design& design) {
  return expectation(design, [](const SelectionMapping& r) { return Rational(static_cast<std::int64_t>(r.n())); });
}

bool without_replacement(const Design& design) {
  return std::all_of(design.atoms().begin(), design.atoms().end(), [](const auto& a) { return a.first.injective(); });
}

DesignKernel DesignKernel::constant(std::string name, Design design) {
  DesignKernel k;
  k.name_ = std::move(name);
  k.constant_ = std::move(design);
  return k;
}

Design DesignKernel::operator()(const Value& z) const {
  if (constant_) return *constant_;
  if (!fn_) throw Error(ErrorCode::MissingKernelEntry, "design kernel '" + name_ + "' is empty");
  return fn_(z);
}

void SurveyModel::finalize() {
  if (theta_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty theta grid");
  if (phi_grid.empty()) phi_grid.push_back(GridPoint{"-", std::nullopt});
  if (signal_laws.size() != theta_grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one signal law per theta grid point");
  }
  if (designs.size() != phi_grid.size()) throw Error(ErrorCode::InvalidArgument, "need one design per phi grid point");
  if (grid.empty()) {
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
      for (std::size_t p = 0; p < phi_grid.size(); ++p) grid.emplace_back(t, p);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (const auto& [t, p] : grid) {
    if (t >= theta_grid.size() || p >= phi_grid.size()) {
      throw Error(ErrorCode::GridMiss, "joint grid references a missing grid point");
    }
  }
  for (const auto& law : signal_laws) {
    for (const auto& [yz, _] : law.atoms()) {
      if (yz.first.size() != population.size()) {
        throw Error(ErrorCode::InvalidArgument, "signal length differs from the population size");
      }
    }
  }
}

std::size_t SurveyModel::theta_index(const std::string& label) const {
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (theta_grid[i].label == label) return i;
  }
  throw Error(ErrorCode::GridMiss, "no theta grid point '" + label + "'");
}

std::size_t SurveyModel::phi_index(const std::string& label) const {
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    if (phi_grid[i].label == label) return i;
  }
  throw Error(ErrorCode::GridMiss, "no phi grid point '" + label + "'");
}

bool SurveyModel::in_grid(std::size_t theta, std::size_t phi) const {
  return std::binary_search(grid.begin(), grid.end(), std::pair{theta, phi});
}

std::string SurveyModel::grid_label(std::size_t theta, std::size_t phi) const {
  std::string out = "theta=" + theta_grid.at(theta).label;
  if (phi_grid.size() > 1 || phi_grid.at(phi).label != "-") out += " phi=" + phi_grid.at(phi).label;
  return out;
}

FiniteDist<WorldState> build_joint(const SurveyModel& m, std::size_t theta, std::size_t phi) {
  if (!m.in_grid(theta, phi)) {
    throw Error(ErrorCode::GridMiss, "grid point (" + std::to_string(theta) + ", " + std::to_string(phi) +
                                         ") is outside the joint grid");
  }
  const DesignKernel& kernel = m.designs[phi];
  std::map<Value, Design> cache;
  std::vector<std::pair<WorldState, Rational>> pairs;
  for (const auto& [yz, w] : m.signal_laws[theta].atoms()) {
    auto it = cache.find(yz.second);
    if (it == cache.end()) it = cache.emplace(yz.second, kernel(yz.second)).first;
    for (const auto& [r, wr] : it->second.atoms()) {
      for (std::size_t u : r.units) {
        if (u >= m.population.size()) throw Error(ErrorCode::InvalidArgument, "selection outside the population");
      }
      pairs.emplace_back(WorldState{yz.first, yz.second, r}, w * wr);
    }
  }
  detail::check_support_size(pairs.size());
  return FiniteDist<WorldState>::canonical(std::move(pairs));
}

std::string ObservationScheme::name() const {
  std::string base;
  switch (tag) {
    case SchemeTag::ValuesOnly:
      base = "values_only";
      break;
    case SchemeTag::ValuesAndMapping:
      base = "values_and_mapping";
      break;
    case SchemeTag::ValuesMappingDesign:
      base = "values_mapping_design";
      break;
    case SchemeTag::ValuesAndSampledWeights:
      base = "values_and_sampled_weights";
      break;
    case SchemeTag::ValuesAndIndicator:
      base = "values_and_indicator";
      break;
    case SchemeTag::Custom:
      base = "custom:" + custom_name;
      break;
  }
  return unordered ? base + " unordered" : base;
}

std::optional<ObservationScheme::CustomFn> builtin_custom_observation(const std::string& name) {
  if (name == "sample_size") {
    return [](const WorldState& w, const Population&) { return Value(static_cast<std::int64_t>(w.r.n())); };
  }
  if (name == "indicator") {
    return [](const WorldState& w, const Population& u) {
      Value::Tuple out;
      for (int i : indicator_vector(w.r, u.size())) out.emplace_back(i);
      return Value::tuple(std::move(out));
    };
  }
  if (name == "sample_sum") {
    return [](const WorldState& w, const Population&) {
      std::int64_t s = 0;
      for (std::size_t u : w.r.units) s += w.y[u];
      return Value(s);
    };
  }
  return std::nullopt;
}

namespace {

Value drawn_values(const WorldState& w) {
  Value::Tuple out;
  out.reserve(w.r.n());
  for (std::size_t u : w.r.units) out.emplace_back(w.y.at(u));
  return Value::tuple(std::move(out));
}

Value sorted_tuple(const Value& v) {
  Value::Tuple items = v.items();
  std::sort(items.begin(), items.end());
  return Value::tuple(std::move(items));
}

}  // namespace

Value observe(const WorldState& w, const ObservationScheme& s, const Population& population,
              const std::vector<Rational>* inclusion) {
  switch (s.tag) {
    case SchemeTag::ValuesOnly: {
      Value values = drawn_values(w);
      return s.unordered ? sorted_tuple(values) : values;
    }
    case SchemeTag::ValuesAndMapping:
      return Value::tuple({drawn_values(w), mapping_labels(w.r, population)});
    case SchemeTag::ValuesMappingDesign:
      return Value::tuple({drawn_values(w), mapping_labels(w.r, population), w.z});
    case SchemeTag::ValuesAndSampledWeights: {
      if (inclusion == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "values_and_sampled_weights needs the realized design's pi");
      }
      Value::Tuple out;
      for (std::size_t u : w.r.units) out.push_back(Value::tuple({Value(w.y.at(u)), Value(inclusion->at(u))}));
      Value v = Value::tuple(std::move(out));
      return s.unordered ? sorted_tuple(v) : v;
    }
    case SchemeTag::ValuesAndIndicator: {
      const auto ind = indicator_vector(w.r, population.size());
      Value::Tuple values;
      Value::Tuple flags;
      for (std::size_t k = 0; k < ind.size(); ++k) {
        flags.emplace_back(ind[k]);
        if (ind[k]) values.emplace_back(w.y.at(k));
      }
      return Value::tuple({Value::tuple(std::move(values)), Value::tuple(std::move(flags))});
    }
    case SchemeTag::Custom:
      if (!s.custom) throw Error(ErrorCode::InvalidArgument, "custom observation '" + s.custom_name + "' has no body");
      return s.custom(w, population);
  }
  return {};
}

namespace {

FiniteDist<Value> observe_joint(const FiniteDist<WorldState>& joint, const DesignKernel& kernel,
                                const ObservationScheme& s, const Population& population) {
  if (s.tag != SchemeTag::ValuesAndSampledWeights) {
    return pushforward(joint, [&](const WorldState& w) { return observe(w, s, population); });
  }
  std::map<Value, std::vector<Rational>> pi_cache;
  return pushforward(joint, [&](const WorldState& w) {
    auto it = pi_cache.find(w.z);
    if (it == pi_cache.end()) it = pi_cache.emplace(w.z, inclusion_probabilities(kernel(w.z), population.size())).first;
    return observe(w, s, population, &it->second);
  });
}

}  // namespace

FiniteDist<Value> observation_distribution(const SurveyModel& m, std::size_t theta, std::size_t phi,
                                           const ObservationScheme& s) {
  return observe_joint(build_joint(m, theta, phi), m.designs[phi], s, m.population);
}

Family family_of(std::shared_ptr<const SurveyModel> model) {
  Family f;
  f.model = model;
  for (const auto& [t, p] : model->grid) {
    f.members.push_back(
        Member{model->grid_label(t, p), t, p, std::nullopt, f.members.size(), build_joint(*model, t, p)});
  }
  return f;
}

FiniteDist<Value> observation_distribution(const Family& family, const Member& member, const ObservationScheme& s) {
  return observe_joint(member.joint, family.model->designs.at(member.phi), s, family.model->population);
}

FiniteDist<Signal> signal_marginal(const Member& member) {
  return pushforward(member.joint, [](const WorldState& w) { return w.y; });
}

}  // namespace ilab
