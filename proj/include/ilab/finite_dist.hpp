#pragma once

// Exact finite probability distributions over totally ordered outcomes.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ilab/error.hpp"
#include "ilab/rational.hpp"
#include "ilab/value.hpp"

namespace ilab {

/// Largest support any constructed distribution may have. Defaults to 10^6
/// atoms; IGNORABILITY_LAB_MAX_SUPPORT overrides it.
std::size_t max_support();
void set_max_support(std::size_t cap);

namespace detail {
void check_support_size(std::size_t size);
}

template <class T>
class FiniteDist {
 public:
  using Atom = std::pair<T, Rational>;

  FiniteDist() = default;

  /// Merges duplicate outcomes by summation, drops zero weights and requires
  /// the merged weights to sum to exactly one.
  static FiniteDist from_pairs(std::vector<Atom> pairs) {
    for (const auto& [_, w] : pairs) {
      if (w.sign() < 0) throw Error(ErrorCode::NegativeWeight, "negative weight " + w.str());
    }
    FiniteDist d = canonical(std::move(pairs));
    Rational total;
    for (const auto& [_, w] : d.atoms_) total += w;
    if (total != Rational(1)) throw Error(ErrorCode::NonUnitMass, "weights sum to " + total.str());
    return d;
  }

  static FiniteDist point(T outcome) { return canonical({Atom{std::move(outcome), Rational(1)}}); }

  static FiniteDist uniform(const std::vector<T>& outcomes) {
    if (outcomes.empty()) throw Error(ErrorCode::NonUnitMass, "uniform over an empty set");
    const Rational w(1, static_cast<std::int64_t>(outcomes.size()));
    std::vector<Atom> pairs;
    pairs.reserve(outcomes.size());
    for (const auto& o : outcomes) pairs.emplace_back(o, w);
    return canonical(std::move(pairs));
  }

  /// Canonicalizes without the unit-mass check. Internal constructions whose
  /// mass is preserved by construction use this.
  static FiniteDist canonical(std::vector<Atom> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const Atom& a, const Atom& b) { return a.first < b.first; });
    FiniteDist d;
    d.atoms_.reserve(pairs.size());
    for (auto& p : pairs) {
      if (!d.atoms_.empty() && d.atoms_.back().first == p.first) {
        d.atoms_.back().second += p.second;
      } else {
        d.atoms_.push_back(std::move(p));
      }
    }
    std::erase_if(d.atoms_, [](const Atom& a) { return a.second.is_zero(); });
    detail::check_support_size(d.atoms_.size());
    return d;
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  Rational weight(const T& outcome) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), outcome,
                               [](const Atom& a, const T& o) { return a.first < o; });
    if (it != atoms_.end() && it->first == outcome) return it->second;
    return Rational(0);
  }

  Rational total_mass() const {
    Rational total;
    for (const auto& [_, w] : atoms_) total += w;
    return total;
  }

  template <class Pred>
  Rational mass(Pred&& event) const {
    Rational total;
    for (const auto& [o, w] : atoms_) {
      if (event(o)) total += w;
    }
    return total;
  }

  friend bool operator==(const FiniteDist& a, const FiniteDist& b) { return a.atoms_ == b.atoms_; }
  friend bool operator<(const FiniteDist& a, const FiniteDist& b) {
    return std::lexicographical_compare(a.atoms_.begin(), a.atoms_.end(), b.atoms_.begin(), b.atoms_.end(),
                                        [](const Atom& x, const Atom& y) {
                                          if (x.first < y.first) return true;
                                          if (y.first < x.first) return false;
                                          return x.second < y.second;
                                        });
  }

 private:
  std::vector<Atom> atoms_;
};

template <class In, class Out>
using Kernel = std::map<In, FiniteDist<Out>>;

template <class T>
FiniteDist<T> dist_new(std::vector<std::pair<T, Rational>> pairs) {
  return FiniteDist<T>::from_pairs(std::move(pairs));
}

/// P^f: weight of b is the total weight of its preimage.
template <class A, class F>
auto pushforward(const FiniteDist<A>& d, F&& f) {
  using B = std::decay_t<std::invoke_result_t<F&, const A&>>;
  std::vector<std::pair<B, Rational>> pairs;
  pairs.reserve(d.size());
  for (const auto& [a, w] : d.atoms()) pairs.emplace_back(f(a), w);
  return FiniteDist<B>::canonical(std::move(pairs));
}

template <class A, class Pred>
FiniteDist<A> condition(const FiniteDist<A>& d, Pred&& event) {
  std::vector<std::pair<A, Rational>> kept;
  Rational m;
  for (const auto& [a, w] : d.atoms()) {
    if (event(a)) {
      kept.emplace_back(a, w);
      m += w;
    }
  }
  if (m.is_zero()) throw Error(ErrorCode::ZeroProbabilityEvent, "conditioning on an event of probability zero");
  for (auto& [_, w] : kept) w /= m;
  return FiniteDist<A>::canonical(std::move(kept));
}

template <class A, class B>
FiniteDist<std::pair<A, B>> product(const FiniteDist<A>& a, const FiniteDist<B>& b) {
  detail::check_support_size(a.size() * b.size());
  std::vector<std::pair<std::pair<A, B>, Rational>> pairs;
  pairs.reserve(a.size() * b.size());
  for (const auto& [x, wx] : a.atoms()) {
    for (const auto& [y, wy] : b.atoms()) pairs.emplace_back(std::pair<A, B>{x, y}, wx * wy);
  }
  return FiniteDist<std::pair<A, B>>::canonical(std::move(pairs));
}

template <class A, class B>
const FiniteDist<B>& kernel_at(const Kernel<A, B>& k, const A& a) {
  auto it = k.find(a);
  if (it == k.end()) throw Error(ErrorCode::MissingKernelEntry, "kernel has no entry for an outcome of the outer law");
  return it->second;
}

/// <a -> k(a) | outer>: weight(b) = sum_a outer(a) k(a)(b).
template <class A, class B>
FiniteDist<B> mix(const FiniteDist<A>& outer, const Kernel<A, B>& k) {
  std::vector<std::pair<B, Rational>> pairs;
  for (const auto& [a, wa] : outer.atoms()) {
    for (const auto& [b, wb] : kernel_at(k, a).atoms()) pairs.emplace_back(b, wa * wb);
  }
  return FiniteDist<B>::canonical(std::move(pairs));
}

template <class A, class B>
FiniteDist<std::pair<A, B>> joint(const FiniteDist<A>& outer, const Kernel<A, B>& k) {
  std::vector<std::pair<std::pair<A, B>, Rational>> pairs;
  for (const auto& [a, wa] : outer.atoms()) {
    for (const auto& [b, wb] : kernel_at(k, a).atoms()) pairs.emplace_back(std::pair<A, B>{a, b}, wa * wb);
  }
  return FiniteDist<std::pair<A, B>>::canonical(std::move(pairs));
}

template <class A, class F>
Rational expectation(const FiniteDist<A>& d, F&& f) {
  Rational total;
  for (const auto& [a, w] : d.atoms()) total += Rational(f(a)) * w;
  return total;
}

template <class A>
Rational total_variation(const FiniteDist<A>& a, const FiniteDist<A>& b) {
  Rational sum;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& x = a.atoms();
  const auto& y = b.atoms();
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      sum += x[i++].second;
    } else if (i == x.size() || y[j].first < x[i].first) {
      sum += y[j++].second;
    } else {
      sum += abs(x[i++].second - y[j++].second);
    }
  }
  return sum / Rational(2);
}

template <class A>
bool dist_eq(const FiniteDist<A>& a, const FiniteDist<A>& b) {
  return a == b;
}

/// Structural equality; throws IncomparableOutcomes when the two supports hold
/// outcomes of different kinds (numbers against tuples, for instance).
bool dist_eq(const FiniteDist<Value>& a, const FiniteDist<Value>& b);

}  // namespace ilab
