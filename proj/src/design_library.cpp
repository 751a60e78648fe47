#include "ilab/design_library.hpp"

#include <algorithm>
#include <numeric>

#include "ilab/error.hpp"

namespace ilab {

namespace {

void enumerate_injective(std::size_t n, std::size_t N, std::vector<std::size_t>& prefix, std::vector<bool>& used,
                         std::vector<SelectionMapping>& out) {
  if (prefix.size() == n) {
    out.push_back(SelectionMapping{prefix});
    return;
  }
  for (std::size_t u = 0; u < N; ++u) {
    if (used[u]) continue;
    used[u] = true;
    prefix.push_back(u);
    enumerate_injective(n, N, prefix, used, out);
    prefix.pop_back();
    used[u] = false;
  }
}

std::vector<SelectionMapping> all_permutations(std::vector<std::size_t> units) {
  std::sort(units.begin(), units.end());
  std::vector<SelectionMapping> out;
  do {
    out.push_back(SelectionMapping{units});
  } while (std::next_permutation(units.begin(), units.end()));
  return out;
}

void for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, std::size_t start,
                     std::vector<std::size_t>& chosen, const std::function<void()>& visit) {
  if (chosen.size() == k) {
    visit();
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    chosen.push_back(pool[i]);
    for_each_subset(pool, k, i + 1, chosen, visit);
    chosen.pop_back();
  }
}

}  // namespace

Design srs_wor(std::size_t n, std::size_t population_size) {
  if (n > population_size) {
    throw Error(ErrorCode::SampleLargerThanPopulation,
                "cannot draw " + std::to_string(n) + " distinct units from " + std::to_string(population_size));
  }
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= population_size - i;
    detail::check_support_size(count);
  }
  std::vector<SelectionMapping> mappings;
  std::vector<std::size_t> prefix;
  std::vector<bool> used(population_size, false);
  enumerate_injective(n, population_size, prefix, used, mappings);
  return Design::uniform(mappings);
}

Design srs_wr(std::size_t n, std::size_t population_size) {
  if (population_size == 0) throw Error(ErrorCode::InvalidArgument, "empty population");
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= population_size;
    detail::check_support_size(count);
  }
  std::vector<SelectionMapping> mappings;
  mappings.reserve(count);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t c = 0; c < count; ++c) {
    mappings.push_back(SelectionMapping{digits});
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < population_size) break;
      digits[i] = 0;
    }
  }
  return Design::uniform(mappings);
}

Design poisson(const std::vector<Rational>& p) {
  for (const auto& pk : p) {
    if (pk.sign() < 0 || pk > Rational(1)) {
      throw Error(ErrorCode::ProbabilityOutOfRange, "inclusion probability " + pk.str() + " is outside [0, 1]");
    }
  }
  // Grow the subset law unit by unit; zero-probability branches drop out.
  std::vector<std::pair<SelectionMapping, Rational>> atoms{{SelectionMapping{}, Rational(1)}};
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::vector<std::pair<SelectionMapping, Rational>> next;
    next.reserve(atoms.size() * 2);
    for (const auto& [r, w] : atoms) {
      if (!p[k].is_zero()) {
        SelectionMapping with = r;
        with.units.push_back(k);
        next.emplace_back(std::move(with), w * p[k]);
      }
      if (p[k] != Rational(1)) next.emplace_back(r, w * (Rational(1) - p[k]));
    }
    detail::check_support_size(next.size());
    atoms = std::move(next);
  }
  return Design::from_pairs(std::move(atoms));
}

Design census(std::size_t population_size) {
  SelectionMapping r;
  r.units.resize(population_size);
  std::iota(r.units.begin(), r.units.end(), std::size_t{0});
  return Design::point(std::move(r));
}

Design fixed_design(SelectionMapping r) { return Design::point(std::move(r)); }

Design stratified_at(const std::vector<std::int64_t>& strata, const std::map<std::int64_t, std::size_t>& alloc) {
  std::map<std::int64_t, std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < strata.size(); ++k) members[strata[k]].push_back(k);
  for (const auto& [h, units] : members) {
    if (!alloc.count(h)) throw Error(ErrorCode::InfeasibleAllocation, "no allocation for stratum " + std::to_string(h));
  }
  std::vector<std::pair<std::int64_t, std::size_t>> plan(alloc.begin(), alloc.end());
  for (const auto& [h, nh] : plan) {
    const std::size_t available = members.count(h) ? members[h].size() : 0;
    if (nh > available) {
      throw Error(ErrorCode::InfeasibleAllocation, "stratum " + std::to_string(h) + " has " +
                                                       std::to_string(available) + " units, allocation asks for " +
                                                       std::to_string(nh));
    }
  }
  // Pick a subset per stratum, then every draw order of the union.
  std::vector<SelectionMapping> mappings;
  std::vector<std::size_t> picked;
  std::function<void(std::size_t)> descend = [&](std::size_t level) {
    if (level == plan.size()) {
      auto perms = all_permutations(picked);
      mappings.insert(mappings.end(), perms.begin(), perms.end());
      detail::check_support_size(mappings.size());
      return;
    }
    const auto& [h, nh] = plan[level];
    static const std::vector<std::size_t> none;
    const auto& pool = members.count(h) ? members.at(h) : none;
    std::vector<std::size_t> chosen;
    for_each_subset(pool, nh, 0, chosen, [&] {
      const std::size_t mark = picked.size();
      picked.insert(picked.end(), chosen.begin(), chosen.end());
      descend(level + 1);
      picked.resize(mark);
    });
  };
  descend(0);
  return Design::uniform(mappings);
}

DesignKernel stratified(std::map<std::int64_t, std::size_t> alloc) {
  return DesignKernel("stratified", [alloc = std::move(alloc)](const Value& z) {
    std::vector<std::int64_t> strata;
    for (const auto& v : z.items()) strata.push_back(v.as_int());
    return stratified_at(strata, alloc);
  });
}

Design select_max_at(const Signal& y) {
  if (y.empty()) throw Error(ErrorCode::InvalidArgument, "select_max on an empty signal");
  std::size_t best = 0;
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (y[k] > y[best]) best = k;
  }
  return Design::point(SelectionMapping{{best}});
}

DesignKernel select_max() {
  return DesignKernel("select_max", [](const Value& z) { return select_max_at(signal_from_value(z)); });
}

std::vector<DesignKernel> mixture_design(const std::vector<std::vector<Rational>>& weights,
                                         const std::vector<DesignKernel>& components) {
  std::vector<DesignKernel> out;
  for (const auto& row : weights) {
    if (row.size() != components.size()) {
      throw Error(ErrorCode::NonUnitMixture, "mixture row has " + std::to_string(row.size()) + " weights for " +
                                                 std::to_string(components.size()) + " components");
    }
    Rational total;
    for (const auto& w : row) {
      if (w.sign() < 0) throw Error(ErrorCode::NonUnitMixture, "negative mixture weight " + w.str());
      total += w;
    }
    if (total != Rational(1)) throw Error(ErrorCode::NonUnitMixture, "mixture weights sum to " + total.str());
    const bool constant = std::all_of(components.begin(), components.end(),
                                      [](const DesignKernel& k) { return k.ignores_z(); });
    auto evaluate = [row, components](const Value& z) {
      std::vector<std::pair<SelectionMapping, Rational>> pairs;
      for (std::size_t i = 0; i < components.size(); ++i) {
        if (row[i].is_zero()) continue;
        const Design part = components[i](z);
        for (const auto& [r, w] : part.atoms()) pairs.emplace_back(r, row[i] * w);
      }
      return Design::canonical(std::move(pairs));
    };
    if (constant) {
      out.push_back(DesignKernel::constant("mixture", evaluate(Value())));
    } else {
      out.emplace_back("mixture", evaluate);
    }
  }
  return out;
}

DesignKernel table_kernel(std::string name, std::map<Value, Design> table) {
  return DesignKernel(std::move(name), [table = std::move(table)](const Value& z) {
    auto it = table.find(z);
    if (it == table.end()) throw Error(ErrorCode::MissingKernelEntry, "design has no entry for z = " + z.text());
    return it->second;
  });
}

FiniteDist<Signal> iid_signal(const FiniteDist<std::int64_t>& marginal, std::size_t population_size) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < population_size; ++i) {
    count *= marginal.size();
    detail::check_support_size(count);
  }
  std::vector<std::pair<Signal, Rational>> atoms{{Signal{}, Rational(1)}};
  for (std::size_t i = 0; i < population_size; ++i) {
    std::vector<std::pair<Signal, Rational>> next;
    next.reserve(atoms.size() * marginal.size());
    for (const auto& [y, w] : atoms) {
      for (const auto& [v, wv] : marginal.atoms()) {
        Signal longer = y;
        longer.push_back(v);
        next.emplace_back(std::move(longer), w * wv);
      }
    }
    atoms = std::move(next);
  }
  return FiniteDist<Signal>::canonical(std::move(atoms));
}

FiniteDist<SignalZ> with_design_variable(const FiniteDist<Signal>& signal, DesignVariable kind, const Value& fixed) {
  return pushforward(signal, [&](const Signal& y) -> SignalZ {
    switch (kind) {
      case DesignVariable::Signal:
        return {y, signal_value(y)};
      case DesignVariable::Fixed:
        return {y, fixed};
      case DesignVariable::None:
        break;
    }
    return {y, Value()};
  });
}

}  // namespace ilab
