#include "ilab/model_build.hpp"

#include <map>

#include "ilab/error.hpp"

namespace ilab {

namespace {

GridPoint to_point(const GridEntry& g) { return GridPoint{g.label, g.value}; }

FiniteDist<Signal> signal_law(const ModelDocument& d, const GridEntry& theta, std::size_t n) {
  if (d.law == "uniform") return iid_signal(FiniteDist<std::int64_t>::uniform(d.alphabet), n);
  if (d.law == "bernoulli") {
    const Rational p = *theta.value;
    return iid_signal(FiniteDist<std::int64_t>::from_pairs({{d.alphabet[0], Rational(1) - p}, {d.alphabet[1], p}}), n);
  }
  for (const auto& [label, table] : d.marginals) {
    if (label == theta.label) return iid_signal(FiniteDist<std::int64_t>::from_pairs(table), n);
  }
  for (const auto& [label, table] : d.joints) {
    if (label != theta.label) continue;
    std::vector<std::pair<Signal, Rational>> pairs;
    for (const auto& [y, w] : table) pairs.emplace_back(signal_from_value(y), w);
    return FiniteDist<Signal>::from_pairs(std::move(pairs));
  }
  throw Error(ErrorCode::SchemaError, "no signal table for theta '" + theta.label + "'");
}

}  // namespace

DesignKernel build_design(const DesignTerm& t, const Population& population) {
  const std::size_t n = population.size();
  const std::string name = t.text();
  const auto unit_count = [&] { return static_cast<std::size_t>(t.args.at(0).as_int()); };
  if (t.variant == "census") return DesignKernel::constant(name, census(n));
  if (t.variant == "srs_wor") return DesignKernel::constant(name, srs_wor(unit_count(), n));
  if (t.variant == "srs_wr") return DesignKernel::constant(name, srs_wr(unit_count(), n));
  if (t.variant == "poisson") {
    std::vector<Rational> p;
    for (const auto& a : t.args) p.push_back(a.as_rational());
    return DesignKernel::constant(name, poisson(p));
  }
  if (t.variant == "fixed") {
    SelectionMapping r;
    for (const auto& label : t.args) r.units.push_back(population.index_of(label));
    return DesignKernel::constant(name, fixed_design(std::move(r)));
  }
  if (t.variant == "stratified") {
    std::map<std::int64_t, std::size_t> alloc;
    for (const auto& a : t.args) alloc[a[0].as_int()] = static_cast<std::size_t>(a[1].as_int());
    return stratified(std::move(alloc));
  }
  if (t.variant == "select_max") return select_max();
  if (t.variant == "mix") {
    std::vector<Rational> weights;
    std::vector<DesignKernel> parts;
    for (const auto& [w, sub] : t.components) {
      weights.push_back(w);
      parts.push_back(build_design(sub, population));
    }
    DesignKernel k = mixture_design({weights}, parts).front();
    return k.ignores_z() ? DesignKernel::constant(name, k(Value())) : DesignKernel(name, [k](const Value& z) { return k(z); });
  }
  if (t.variant == "cases") {
    std::map<Value, Design> table;
    for (const auto& [z, sub] : t.cases) table.emplace(z, build_design(sub, population)(z));
    return table_kernel(name, std::move(table));
  }
  throw Error(ErrorCode::UnknownDesignVariant, "unknown design variant '" + t.variant + "'");
}

ObservationScheme build_scheme(const std::string& scheme, bool unordered) {
  ObservationScheme s;
  if (scheme == "values_only") s.tag = SchemeTag::ValuesOnly;
  else if (scheme == "values_and_mapping") s.tag = SchemeTag::ValuesAndMapping;
  else if (scheme == "values_mapping_design") s.tag = SchemeTag::ValuesMappingDesign;
  else if (scheme == "values_and_sampled_weights") s.tag = SchemeTag::ValuesAndSampledWeights;
  else if (scheme == "values_and_indicator") s.tag = SchemeTag::ValuesAndIndicator;
  else if (scheme.rfind("custom(", 0) == 0 && scheme.back() == ')') {
    const std::string name = scheme.substr(7, scheme.size() - 8);
    auto fn = builtin_custom_observation(name);
    if (!fn) throw Error(ErrorCode::SchemaError, "unknown custom observation '" + name + "'");
    s = ObservationScheme::of_custom(name, *fn);
  } else {
    throw Error(ErrorCode::SchemaError, "unknown observation scheme '" + scheme + "'");
  }
  s.unordered = unordered;
  return s;
}

BuiltModel build_model(const ModelDocument& d) {
  const auto rethrow_at = [&](const std::string& key, const Error& e) -> DocumentError {
    if (const auto* located = dynamic_cast<const DocumentError*>(&e)) return *located;
    std::string rule = e.what();
    const std::string prefix = std::string(error_code_name(e.code())) + ": ";
    if (rule.rfind(prefix, 0) == 0) rule.erase(0, prefix.size());
    return DocumentError(e.code(), d.locations.of(key), rule);
  };

  auto m = std::make_shared<SurveyModel>();
  BuiltModel b;
  b.name = d.name.value_or("model");
  m->population = Population(d.unit_labels());
  const std::size_t n = m->population.size();

  Value fixed_z;
  DesignVariable kind = DesignVariable::None;
  if (d.z == "signal") {
    kind = DesignVariable::Signal;
    m->z_contains_y = true;
  } else if (d.z && d.z->rfind("fixed(", 0) == 0) {
    kind = DesignVariable::Fixed;
    fixed_z = parse_value(d.z->substr(6, d.z->size() - 7));
  }

  try {
    for (const auto& g : d.theta) {
      m->theta_grid.push_back(to_point(g));
      m->signal_laws.push_back(with_design_variable(signal_law(d, g, n), kind, fixed_z));
    }
  } catch (const Error& e) {
    throw rethrow_at("signal.law", e);
  }

  const auto phis = d.phi_points();
  for (const auto& g : phis) m->phi_grid.push_back(to_point(g));
  for (const auto& g : phis) {
    const DesignTerm* term = d.design ? &*d.design : nullptr;
    std::string key = "design.variant";
    for (const auto& [label, t] : d.design_per_phi) {
      if (label == g.label) {
        term = &t;
        key = "design.variant." + label;
      }
    }
    try {
      m->designs.push_back(build_design(*term, m->population));
    } catch (const Error& e) {
      throw rethrow_at(key, e);
    }
  }

  if (d.gamma_mode == "diagonal") {
    for (std::size_t i = 0; i < d.theta.size(); ++i) m->grid.emplace_back(i, i);
  } else if (d.gamma_pairs) {
    for (const auto& [t, p] : *d.gamma_pairs) m->grid.emplace_back(m->theta_index(t), m->phi_index(p));
  }
  m->finalize();

  // Kernels that read z only fail when evaluated; build every joint now so a
  // bad file is reported at load time with a location.
  try {
    for (const auto& [t, p] : m->grid) (void)build_joint(*m, t, p);
  } catch (const Error& e) {
    throw rethrow_at("design.variant", e);
  }

  b.model = m;
  try {
    b.scheme = build_scheme(d.scheme, d.unordered.value_or(false));
  } catch (const Error& e) {
    throw rethrow_at("observation.scheme", e);
  }
  if (d.target) b.target = *d.target;
  if (d.split_v) {
    b.split_v = *d.split_v;
    b.split_v_bar = *d.split_v_bar;
  }
  return b;
}

ProcessSplit build_split(const BuiltModel& b, const Family& f, OmegaMode mode) {
  const Population& pop = f.model->population;
  return classify_split(world_space(f, mode), make_variable(b.split_v, pop), make_variable(b.split_v_bar, pop));
}

}  // namespace ilab
