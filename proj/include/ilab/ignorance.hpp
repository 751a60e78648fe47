#pragma once

// Complements, Phi-sets and the transformation that ignores a nuisance
// process: every member P is replaced by the mixture over vbar of the
// Phi-conditioned law of (V, vbar), reconstructed through the meet map.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/sampling_model.hpp"
#include "ilab/value.hpp"

namespace ilab {

struct RandomVariableRef {
  std::string name;
  std::function<Value(const WorldState&)> eval;
};

/// Vocabulary: signal, design_variable, selection, values_on_sample,
/// indicator, constant, unit<k> (1-based signal coordinate), and composite
/// tuples written "(a, b)".
RandomVariableRef make_variable(const std::string& spec, const Population& population);

enum class SplitStatus { NotComplement, Complement, DistinctComplement };
std::string split_status_name(SplitStatus s);

/// How the world space Omega used for class computations is formed.
/// Product: every (y, z) pair seen anywhere in the family crossed with every
/// selection seen anywhere. SupportUnion: the union of the members' supports.
enum class OmegaMode { Product, SupportUnion };
std::string omega_mode_name(OmegaMode m);

std::vector<WorldState> world_space(const Family& family, OmegaMode mode);

/// (V, Vbar) over an explicit Omega, with the class maps, the meet map
/// (v, vbar) -> omega and every Phi-set precomputed.
class ProcessSplit {
 public:
  ProcessSplit(std::vector<WorldState> omega, RandomVariableRef v, RandomVariableRef v_bar);

  SplitStatus status() const { return status_; }
  const std::vector<WorldState>& omega() const { return omega_; }
  const RandomVariableRef& v() const { return v_; }
  const RandomVariableRef& v_bar() const { return v_bar_; }
  const Value& v_of(std::size_t i) const { return v_values_[i]; }
  const Value& v_bar_of(std::size_t i) const { return v_bar_values_[i]; }
  /// Vbar(Omega) in canonical order.
  const std::vector<Value>& v_bar_image() const { return v_bar_image_; }
  const std::vector<Value>& v_image() const { return v_image_; }
  /// Indices into omega of Phi_{vbar} = V^-1(V(Vbar^-1({vbar}))).
  const std::vector<std::size_t>& phi(const Value& v_bar_value) const;
  /// The unique omega with V = v and Vbar = vbar; requires a complement.
  std::optional<std::size_t> meet(const Value& v, const Value& v_bar_value) const;

 private:
  std::vector<WorldState> omega_;
  RandomVariableRef v_;
  RandomVariableRef v_bar_;
  std::vector<Value> v_values_;
  std::vector<Value> v_bar_values_;
  std::vector<Value> v_image_;
  std::vector<Value> v_bar_image_;
  std::map<Value, std::vector<std::size_t>> phi_;
  std::map<std::pair<Value, Value>, std::size_t> meet_;
  SplitStatus status_ = SplitStatus::NotComplement;
};

ProcessSplit classify_split(std::vector<WorldState> omega, RandomVariableRef v, RandomVariableRef v_bar);

/// image(h, h') = image(h) x image(h') over Omega.
bool variation_independent(const RandomVariableRef& h, const RandomVariableRef& h2,
                           const std::vector<WorldState>& omega);

/// The worlds of Phi_{vbar}; ValueNotInImage when vbar is not in Vbar(Omega).
std::vector<WorldState> phi_set(const Value& v_bar_value, const ProcessSplit& split);

/// Law over Omega of w(vbar) * P(V = V(omega) | Phi_vbar) at vbar = Vbar(omega).
/// Requires P(Phi_vbar) > 0 for every vbar in Vbar(Omega).
FiniteDist<WorldState> ignore_with(const FiniteDist<WorldState>& p, const ProcessSplit& split,
                                   const FiniteDist<Value>& nuisance_law);

/// Nuisance marginal P^{Vbar}.
FiniteDist<Value> nuisance_marginal(const FiniteDist<WorldState>& p, const ProcessSplit& split);

struct NuisancePolicy {
  enum class Tag { DiracFix, SingleArbitrary, MarginalFamily };
  Tag tag = Tag::DiracFix;
  /// SingleArbitrary only; uniform over Vbar(Omega) when absent.
  std::optional<FiniteDist<Value>> arbitrary;

  static NuisancePolicy dirac() { return {Tag::DiracFix, std::nullopt}; }
  static NuisancePolicy single(std::optional<FiniteDist<Value>> d = std::nullopt) { return {Tag::SingleArbitrary, d}; }
  static NuisancePolicy marginal() { return {Tag::MarginalFamily, std::nullopt}; }
  std::string name() const;
};

/// The ignored family. DiracFix yields one member per (P, vbar) pair,
/// SingleArbitrary one per P with a shared nuisance law, MarginalFamily one
/// per P paired with its own P^{Vbar}.
Family ignore_model(const Family& m, const ProcessSplit& split, const NuisancePolicy& policy);

/// ignore_with(P, split, P^{Vbar}).
FiniteDist<WorldState> atrandomize(const FiniteDist<WorldState>& p, const ProcessSplit& split);

enum class TargetKind { Predictand, SignalLawFunctional, ModelIndex };
std::string target_kind_name(TargetKind k);

struct Target {
  std::string name;
  TargetKind kind = TargetKind::Predictand;
  /// Predictand: evaluated on each world.
  std::function<Value(const WorldState&)> predictand;
  /// Functional of P^Y. Empty for "theta", which is the grid value whose
  /// signal law equals P^Y.
  std::function<Value(const FiniteDist<Signal>&)> functional;
};

/// theta, mean_y1, population_mean, signal, model_index.
Target builtin_target(const std::string& name);

/// Target values per member (parametric targets) or the predictand itself.
struct TargetValues {
  Target target;
  std::vector<Value> per_member;  // empty for predictands
};

Value theta_value(const SurveyModel& m, std::size_t theta);
TargetValues evaluate_target(const Target& target, const Family& m);
/// The target on the ignored family: predictands unchanged, functionals of
/// P^Y recomputed on (P*)^Y, the model index restricted to members of m*
/// that already belong to m. Throws TargetNotTransformable otherwise.
TargetValues transform_target(const Target& target, const Family& m, const Family& m_star);

}  // namespace ilab
