#include "ilab/rubin_audit.hpp"

#include <algorithm>
#include <set>

#include "ilab/design_library.hpp"
#include "ilab/error.hpp"

namespace ilab {

void require_rubin_shape(const Family& m, const ObservationScheme& s) {
  if (s.tag != SchemeTag::ValuesAndIndicator && s.tag != SchemeTag::ValuesAndMapping) {
    throw Error(ErrorCode::NotRubinShape, "the observation must reveal the sampled values and the indicator, got " +
                                              s.name());
  }
  const SurveyModel& model = *m.model;
  bool z_is_y = true;
  std::set<Value> zs;
  for (const auto& law : model.signal_laws) {
    for (const auto& [yz, _] : law.atoms()) {
      if (!(yz.second == signal_value(yz.first))) z_is_y = false;
      zs.insert(yz.second);
    }
  }
  const bool y_free = zs.size() <= 1 || std::all_of(model.designs.begin(), model.designs.end(),
                                                    [](const DesignKernel& k) { return k.ignores_z(); });
  if (!z_is_y && !y_free) {
    throw Error(ErrorCode::NotRubinShape, "the design variable must be the signal itself or unused by the design");
  }
  for (const auto& member : m.members) {
    for (const auto& [w, _] : member.joint.atoms()) {
      if (!std::is_sorted(w.r.units.begin(), w.r.units.end()) || !w.r.injective()) {
        throw Error(ErrorCode::NotRubinShape, "selections must be without replacement and listed in label order");
      }
    }
  }
}

namespace {

struct ObservedPart {
  SelectionMapping t;
  Value values;
};

ObservedPart decode(const Value& x, const ObservationScheme& s, const Population& population) {
  ObservedPart out;
  out.values = x[0];
  if (s.tag == SchemeTag::ValuesAndIndicator) {
    const auto& flags = x[1].items();
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (flags[k].as_int() == 1) out.t.units.push_back(k);
    }
  } else {
    out.t = mapping_from_labels(population, x[1].items());
  }
  return out;
}

Value restrict(const Signal& y, const SelectionMapping& t) {
  Value::Tuple v;
  for (std::size_t u : t.units) v.emplace_back(y.at(u));
  return Value::tuple(std::move(v));
}

Value indicator_value(const SelectionMapping& t, std::size_t n) {
  Value::Tuple v;
  for (int i : indicator_vector(t, n)) v.emplace_back(i);
  return Value::tuple(std::move(v));
}

}  // namespace

RubinRecord rubin_theorem_audit(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                                const Value& x) {
  require_rubin_shape(m, s);
  const SurveyModel& model = *m.model;
  const std::size_t n_units = model.population.size();
  const ObservedPart obs = decode(x, s, model.population);
  SelectionDensity g(model);

  std::set<Signal> signals;
  for (const auto& law : model.signal_laws) {
    for (const auto& [yz, _] : law.atoms()) signals.insert(yz.first);
  }

  RubinRecord rec;
  rec.x = x;
  rec.mar = check_mar(m, split, s, x, MarVariant::Local).holds;
  rec.oar = check_oar(m, split, s, x, MarVariant::Local).holds;
  rec.distinct = check_distinct(model);

  // Per grid point quantities.
  struct Point {
    std::size_t theta;
    std::size_t phi;
    Rational k;                       // P(M = m~)
    Rational lik;                     // P(X = x)
    Rational lik_ignoring;            // P_theta(U1 = u~1)
    FiniteDist<Value> u1;             // P_theta^{U1}
    std::optional<FiniteDist<Value>> u1_given_m;
    bool g_one = true;                // g(m~ | y) = 1 for every y of positive mass
    bool cond_exp_const = true;       // E[g | U1 = u1] = k for every u1 of positive mass
    Rational cond_exp_at_obs;         // E_theta[g | U1 = u~1]
  };
  std::vector<Point> points;
  for (const auto& [theta, phi] : model.grid) {
    Point p{theta, phi, {}, {}, {}, {}, std::nullopt, true, true, {}};
    std::vector<std::pair<Value, Rational>> u1;
    std::vector<std::pair<Value, Rational>> u1_m;
    std::map<Value, std::pair<Rational, Rational>> by_u1;  // u1 -> (P(U1 = u1), E[g; U1 = u1])
    for (const auto& y : signals) {
      const Rational py = g.signal_mass(theta, y);
      if (py.is_zero()) continue;
      const Rational gy = g.g(theta, phi, obs.t, y);
      const Value u = restrict(y, obs.t);
      u1.emplace_back(u, py);
      u1_m.emplace_back(u, py * gy);
      p.k += py * gy;
      auto& cell = by_u1[u];
      cell.first += py;
      cell.second += py * gy;
      if (gy != Rational(1)) p.g_one = false;
      if (u == obs.values) {
        p.lik += py * gy;
        p.lik_ignoring += py;
      }
    }
    p.u1 = FiniteDist<Value>::canonical(std::move(u1));
    if (!p.k.is_zero()) {
      for (auto& [_, w] : u1_m) w /= p.k;
      p.u1_given_m = FiniteDist<Value>::canonical(std::move(u1_m));
    }
    for (const auto& [u, cell] : by_u1) {
      const Rational e = cell.second / cell.first;
      if (e != p.k) p.cond_exp_const = false;
      if (u == obs.values) p.cond_exp_at_obs = e;
    }
    points.push_back(std::move(p));
  }

  auto where = [&](const Point& p) { return model.grid_label(p.theta, p.phi); };

  {  // 6.1: MAR and OAR imply P^{U1} = P^{U1 | M = m~} wherever k > 0.
    TheoremCheck c{"6.1", false, rec.mar && rec.oar, true, {}};
    for (const auto& p : points) {
      if (p.k.is_zero()) continue;
      if (!(p.u1 == *p.u1_given_m)) {
        c.conclusion = false;
        c.detail = "conditional law of the observed values differs at " + where(p);
        break;
      }
    }
    rec.theorems.push_back(c);
  }
  {  // 6.2: E[g | u1] = k > 0 everywhere iff the two laws agree everywhere.
    TheoremCheck c{"6.2", true, true, true, {}};
    for (const auto& p : points) {
      if (p.k.is_zero() || !p.cond_exp_const) c.hypotheses = false;
      if (p.k.is_zero() || !(p.u1 == *p.u1_given_m)) c.conclusion = false;
    }
    rec.theorems.push_back(c);
  }
  {  // 6.3: g(m~ | y) = 1 a.s. iff the law of (M, U1) is Dirac(m~) x P^{U1}.
    TheoremCheck c{"6.3", true, true, true, {}};
    const Value m_tilde = indicator_value(obs.t, n_units);
    for (const auto& p : points) {
      if (!p.g_one) c.hypotheses = false;
      const auto joint = build_joint(model, p.theta, p.phi);
      const auto mu = pushforward(joint, [&](const WorldState& w) {
        return std::pair<Value, Value>{indicator_value(w.r, n_units), restrict(w.y, obs.t)};
      });
      const auto expected = product(FiniteDist<Value>::point(m_tilde), p.u1);
      if (!(mu == expected)) c.conclusion = false;
    }
    rec.theorems.push_back(c);
  }

  // Cross-multiplied likelihood ratios for every phi and every theta pair.
  auto ratios_match = [&](bool only_positive_g, std::string& detail) {
    for (const auto& a : points) {
      for (const auto& b : points) {
        if (a.phi != b.phi) continue;
        if (only_positive_g && (a.lik.is_zero() && b.lik.is_zero())) continue;
        if (a.lik * b.lik_ignoring != b.lik * a.lik_ignoring) {
          detail = "ratio differs between " + where(a) + " and " + where(b);
          return false;
        }
      }
    }
    return true;
  };
  {  // 7.1: MAR and distinct parameters imply correct ratios where g > 0.
    TheoremCheck c{"7.1", false, rec.mar && rec.distinct, true, {}};
    c.conclusion = ratios_match(true, c.detail);
    rec.theorems.push_back(c);
  }
  {  // 7.2: positive ignoring-likelihood, product grid and E[g | u~1] free of theta.
    TheoremCheck c{"7.2", false, true, true, {}};
    bool product_grid = rec.distinct;
    std::set<std::size_t> thetas;
    std::set<std::size_t> phis;
    for (const auto& [t, p] : model.grid) {
      thetas.insert(t);
      phis.insert(p);
    }
    product_grid = product_grid && model.grid.size() == thetas.size() * phis.size();
    bool positive = std::all_of(points.begin(), points.end(), [](const Point& p) { return !p.lik_ignoring.is_zero(); });
    bool constant = true;
    for (std::size_t phi : phis) {
      std::optional<Rational> value;
      for (const auto& p : points) {
        if (p.phi != phi) continue;
        if (p.lik_ignoring.is_zero() || p.cond_exp_at_obs.is_zero()) constant = false;
        if (!value) value = p.cond_exp_at_obs;
        if (p.cond_exp_at_obs != *value) constant = false;
      }
    }
    c.hypotheses = positive && product_grid && constant;
    c.conclusion = ratios_match(false, c.detail);
    rec.theorems.push_back(c);
  }
  return rec;
}

std::size_t RubinAudit::counterexamples(const std::string& theorem) const {
  std::size_t n = 0;
  for (const auto& r : records) {
    for (const auto& t : r.theorems) {
      if ((theorem.empty() || t.theorem == theorem) && !t.sound()) ++n;
    }
  }
  return n;
}

RubinAudit audit_all_x(const RubinJob& job) {
  RubinAudit out;
  out.name = job.name;
  const Family m = family_of(job.model);
  require_rubin_shape(m, job.scheme);
  const ProcessSplit split(world_space(m, OmegaMode::Product), make_variable("(signal, design_variable)", job.model->population),
                           make_variable("selection", job.model->population));
  std::set<Value> xs;
  for (const auto& member : m.members) {
    const auto law = observation_distribution(m, member, job.scheme);
    for (const auto& [x, _] : law.atoms()) xs.insert(x);
  }
  for (const auto& x : xs) out.records.push_back(rubin_theorem_audit(m, split, job.scheme, x));
  return out;
}

namespace {

struct CatalogKernel {
  std::string name;
  bool reads_signal;
  std::function<Design(const Signal&)> at;
};

SelectionMapping units(std::initializer_list<std::size_t> u) { return SelectionMapping{std::vector<std::size_t>(u)}; }

std::vector<CatalogKernel> catalog() {
  return {
      {"census", false, [](const Signal&) { return Design::point(units({0, 1})); }},
      {"uniform_patterns", false,
       [](const Signal&) { return Design::uniform({units({}), units({0}), units({1}), units({0, 1})}); }},
      {"unit1_only", false, [](const Signal&) { return Design::point(units({0})); }},
      {"unit2_if_y1", true,
       [](const Signal& y) { return Design::point(y[0] == 1 ? units({0, 1}) : units({0})); }},
      {"unit1_if_y1", true,
       [](const Signal& y) { return Design::point(y[0] == 1 ? units({0, 1}) : units({1})); }},
      {"mix_if_y2", true,
       [](const Signal& y) {
         return y[1] == 1 ? Design::uniform({units({0}), units({0, 1})}) : Design::point(units({0, 1}));
       }},
  };
}

}  // namespace

std::vector<std::string> rubin_kernel_catalog() {
  std::vector<std::string> out;
  for (const auto& k : catalog()) out.push_back(k.name);
  return out;
}

std::vector<RubinJob> rubin_sweep_family() {
  const auto kernels = catalog();
  const std::vector<Rational> thetas{Rational(1, 3), Rational(1, 2), Rational(2, 3)};
  std::vector<std::vector<std::size_t>> theta_sets;
  for (std::size_t i = 0; i < thetas.size(); ++i) theta_sets.push_back({i});
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    for (std::size_t j = i + 1; j < thetas.size(); ++j) theta_sets.push_back({i, j});
  }
  std::vector<std::vector<std::size_t>> phi_sets;
  for (std::size_t i = 0; i < kernels.size(); ++i) phi_sets.push_back({i});
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    for (std::size_t j = i; j < kernels.size(); ++j) phi_sets.push_back({i, j});
  }

  std::vector<RubinJob> jobs;
  for (const auto& ts : theta_sets) {
    for (const auto& ps : phi_sets) {
      const bool reads_signal = std::any_of(ps.begin(), ps.end(), [&](std::size_t k) { return kernels[k].reads_signal; });
      for (int diagonal = 0; diagonal < 2; ++diagonal) {
        if (diagonal && !(ts.size() == 2 && ps.size() == 2)) continue;
        auto model = std::make_shared<SurveyModel>();
        model->population = Population::range(2);
        model->z_contains_y = reads_signal;
        std::string name = "theta={";
        for (std::size_t i = 0; i < ts.size(); ++i) {
          const Rational& th = thetas[ts[i]];
          model->theta_grid.push_back(GridPoint{Value(th).text(), th});
          const auto bern = FiniteDist<std::int64_t>::from_pairs({{0, Rational(1) - th}, {1, th}});
          model->signal_laws.push_back(with_design_variable(
              iid_signal(bern, 2), reads_signal ? DesignVariable::Signal : DesignVariable::None));
          name += (i ? "," : "") + Value(th).text();
        }
        name += "} phi={";
        for (std::size_t i = 0; i < ps.size(); ++i) {
          const auto& k = kernels[ps[i]];
          model->phi_grid.push_back(GridPoint{"p" + std::to_string(i + 1) + ":" + k.name, std::nullopt});
          if (k.reads_signal) {
            auto at = k.at;
            model->designs.emplace_back(k.name, [at](const Value& z) { return at(signal_from_value(z)); });
          } else {
            model->designs.push_back(DesignKernel::constant(k.name, k.at(Signal{0, 0})));
          }
          name += (i ? "," : "") + k.name;
        }
        name += diagonal ? "} gamma=diagonal" : "} gamma=product";
        if (diagonal) model->grid = {{0, 0}, {1, 1}};
        model->finalize();
        jobs.push_back(RubinJob{name, model, ObservationScheme{SchemeTag::ValuesAndIndicator, false, {}, {}}});
      }
    }
  }
  return jobs;
}

}  // namespace ilab
