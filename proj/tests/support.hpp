#pragma once

// Shared fixtures for the unit, property and acceptance tests.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ilab/design_library.hpp"
#include "ilab/error.hpp"
#include "ilab/ignorance.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab::testing {

inline Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

inline FiniteDist<std::int64_t> bernoulli(const Rational& p) {
  return dist_new<std::int64_t>({{0, Rational(1) - p}, {1, p}});
}

inline Value int_tuple(const std::vector<std::int64_t>& ys) {
  Value::Tuple t;
  for (auto y : ys) t.emplace_back(y);
  return Value::tuple(std::move(t));
}

/// Runs fn and returns the code of the ilab::Error it throws; InvalidArgument
/// plus a flag when it throws nothing.
template <class Fn>
std::pair<bool, ErrorCode> thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {true, e.code()};
  }
  return {false, ErrorCode::InvalidArgument};
}

struct NamedDesign {
  std::string name;
  std::size_t population_size;
  Design design;
};

/// Every design of the size-identity sweep: srs_wor, srs_wr, stratified,
/// poisson, select_max and mixtures over populations N <= max_n and every
/// feasible sample size.
inline std::vector<NamedDesign> size_identity_designs(std::size_t max_n = 5) {
  std::vector<NamedDesign> out;
  const auto tag = [](const std::string& kind, std::size_t n_pop, const std::string& rest) {
    return kind + "(N=" + std::to_string(n_pop) + (rest.empty() ? "" : ", " + rest) + ")";
  };
  const std::vector<Rational> poisson_pool{Rational(1, 2), Rational(1, 3), Rational(3, 4), Rational(1),
                                           Rational(0), Rational(2, 5)};
  for (std::size_t big_n = 1; big_n <= max_n; ++big_n) {
    for (std::size_t n = 0; n <= big_n; ++n) {
      out.push_back({tag("srs_wor", big_n, "n=" + std::to_string(n)), big_n, srs_wor(n, big_n)});
      out.push_back({tag("srs_wr", big_n, "n=" + std::to_string(n)), big_n, srs_wr(n, big_n)});
    }
    // Two strata: the first half of the labels and the rest.
    std::vector<std::int64_t> strata(big_n);
    const std::size_t first = (big_n + 1) / 2;
    for (std::size_t k = 0; k < big_n; ++k) strata[k] = k < first ? 1 : 2;
    for (std::size_t a = 0; a <= first; ++a) {
      for (std::size_t b = 0; b <= big_n - first; ++b) {
        std::map<std::int64_t, std::size_t> alloc{{1, a}};
        if (big_n > first) alloc[2] = b;
        else if (b > 0) continue;
        out.push_back({tag("stratified", big_n, std::to_string(a) + "+" + std::to_string(b)), big_n,
                       stratified_at(strata, alloc)});
      }
    }
    for (std::size_t shift = 0; shift < 3; ++shift) {
      std::vector<Rational> p;
      for (std::size_t k = 0; k < big_n; ++k) p.push_back(poisson_pool[(k + shift) % poisson_pool.size()]);
      out.push_back({tag("poisson", big_n, "shift=" + std::to_string(shift)), big_n, poisson(p)});
    }
    // select_max at every signal over {0, 1, 2}^N.
    std::vector<std::int64_t> y(big_n, 0);
    for (;;) {
      std::string label;
      for (auto v : y) label += std::to_string(v);
      out.push_back({tag("select_max", big_n, "y=" + label), big_n, select_max_at(y)});
      std::size_t k = 0;
      while (k < big_n && ++y[k] == 3) y[k++] = 0;
      if (k == big_n) break;
    }
    for (std::size_t n = 0; n <= big_n; ++n) {
      const auto kernels = mixture_design(
          {{Rational(1, 3), Rational(1, 2), Rational(1, 6)}},
          {DesignKernel::constant("srs_wor", srs_wor(n, big_n)), DesignKernel::constant("srs_wr", srs_wr(n, big_n)),
           DesignKernel::constant("census", census(big_n))});
      out.push_back({tag("mixture", big_n, "n=" + std::to_string(n)), big_n, kernels.front()(Value())});
    }
  }
  return out;
}

inline Rational sum(const std::vector<Rational>& xs) {
  Rational total;
  for (const auto& x : xs) total += x;
  return total;
}


/// Worlds on a one-unit population: signal y in {0, 1} and the unit either
/// drawn or not. The signal and selection projections split these worlds.
inline WorldState tiny_world(std::int64_t y, bool drawn) {
  WorldState w;
  w.y = {y};
  if (drawn) w.r.units = {0};
  return w;
}

struct AlgebraCase {
  std::string name;
  ProcessSplit split;
  FiniteDist<WorldState> p;
};

/// Every 2x2 and 3-point world support with both projection splits and a
/// handful of weightings each.
inline std::vector<AlgebraCase> atrandomize_cases() {
  const Population one = Population::range(1);
  std::vector<WorldState> all;
  for (std::int64_t y = 0; y < 2; ++y) {
    for (bool d : {false, true}) all.push_back(tiny_world(y, d));
  }
  std::vector<std::vector<WorldState>> supports{all};
  for (std::size_t drop = 0; drop < all.size(); ++drop) {
    std::vector<WorldState> three;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i != drop) three.push_back(all[i]);
    }
    supports.push_back(three);
  }
  const std::vector<std::vector<std::int64_t>> weightings{{1, 1, 1, 1}, {1, 2, 3, 4}, {5, 1, 1, 3}, {2, 7, 3, 1}};
  std::vector<AlgebraCase> out;
  for (const auto& support : supports) {
    for (const auto& [v, vb] : {std::pair{"signal", "selection"}, std::pair{"selection", "signal"}}) {
      for (const auto& raw : weightings) {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < support.size(); ++i) total += raw[i];
        std::vector<std::pair<WorldState, Rational>> pairs;
        std::string name = std::to_string(support.size()) + "-point V=" + v + " weights";
        for (std::size_t i = 0; i < support.size(); ++i) {
          pairs.emplace_back(support[i], Rational(raw[i], total));
          name += " " + std::to_string(raw[i]);
        }
        out.push_back({name, classify_split(support, make_variable(v, one), make_variable(vb, one)),
                       FiniteDist<WorldState>::from_pairs(pairs)});
      }
    }
  }
  return out;
}

/// The product construction P^V (x) P^Vbar mapped back through the meet map.
inline FiniteDist<WorldState> product_construction(const FiniteDist<WorldState>& p, const ProcessSplit& split) {
  const auto pv = pushforward(p, [&](const WorldState& w) { return split.v().eval(w); });
  const auto pvb = nuisance_marginal(p, split);
  std::vector<std::pair<WorldState, Rational>> pairs;
  for (const auto& [v, wv] : pv.atoms()) {
    for (const auto& [vb, wvb] : pvb.atoms()) {
      pairs.emplace_back(split.omega().at(split.meet(v, vb).value()), wv * wvb);
    }
  }
  return FiniteDist<WorldState>::from_pairs(pairs);
}

}  // namespace ilab::testing
