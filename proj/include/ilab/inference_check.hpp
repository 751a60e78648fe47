#pragma once

// Likelihoods, Rubin's conditions, the three equivalence-of-inference tests
// and the ignorable / informative classifier.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/ignorance.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

enum class InferenceType { LikelihoodBased, FrequentistEstimation, Bayesian };
enum class Verdict { Ignorable, Informative };
std::string inference_type_name(InferenceType t);
std::string verdict_name(Verdict v);

/// Target value -> likelihood at a fixed observation.
using LikelihoodTable = std::map<Value, Rational>;

/// L(tau; x) = sup over members of P(X = x, target = tau). Rows cover every
/// target value the family can take; impossible x gives an all-zero table.
/// Throws UnknownObservation when x has a shape no observation can have.
LikelihoodTable likelihood(const Family& m, const TargetValues& tv, const ObservationScheme& s, const Value& x);
/// Tables for every x of positive mass under some member.
std::map<Value, LikelihoodTable> likelihood_tables(const Family& m, const TargetValues& tv, const ObservationScheme& s);

/// g_{theta,phi}(t | y) = sum_z P_theta(z | y) K_phi(z)(t), the counting
/// density of the selection given the signal.
class SelectionDensity {
 public:
  explicit SelectionDensity(const SurveyModel& m);
  Rational signal_mass(std::size_t theta, const Signal& y) const;
  Rational g(std::size_t theta, std::size_t phi, const SelectionMapping& t, const Signal& y) const;

 private:
  const SurveyModel& m_;
  std::vector<std::map<Signal, Rational>> signal_mass_;
  std::vector<std::map<Signal, std::vector<std::pair<Value, Rational>>>> z_given_y_;
  mutable std::map<std::pair<std::size_t, Value>, Design> design_cache_;
};

struct ConditionCheck {
  bool holds = true;
  std::string variant;  // "local" or "uniform"
  std::string detail;   // first violation, empty when the condition holds
};

enum class MarVariant { Local, Uniform };

/// Missing at random: for every phi and every selection t compatible with x,
/// g_{theta,phi}(t | y) takes one value across all compatible y (and all theta
/// paired with phi) of positive mass. Uniform: the local condition at every x
/// of positive mass.
ConditionCheck check_mar(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                         const std::optional<Value>& x, MarVariant variant);
/// Observed at random: for every phi, compatible t and unobserved part of y,
/// g is constant across the observed parts.
ConditionCheck check_oar(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                         const std::optional<Value>& x, MarVariant variant);
/// theta and phi projections of the joint grid are variation independent.
bool check_distinct(const SurveyModel& m);

struct LikelihoodComparison {
  bool equivalent = false;
  std::optional<Rational> alpha;
  std::string mode;  // "local" (per-x alpha) or "uniform" (one alpha for every x)
  std::map<Value, LikelihoodTable> left;
  std::map<Value, LikelihoodTable> right;
  std::optional<Value> violating_x;
  std::optional<Value> violating_target;
  std::string reason;
};

/// L* = alpha * L with one positive alpha: for the given x, or over every x
/// of positive mass under either family when x is absent.
LikelihoodComparison likelihood_equivalent(const Family& m, const Family& m_star, const TargetValues& tv,
                                           const TargetValues& tv_star, const ObservationScheme& s,
                                           const std::optional<Value>& x);

struct Estimator {
  std::string name;
  std::function<Value(const Value& x)> fn;
};

/// sample_mean ("NA" on an empty sample), first_value, sample_values, observation.
Estimator builtin_estimator(const std::string& name, const ObservationScheme& s);
/// The drawn values carried by an observation of the given scheme.
Value sample_values(const Value& x, const ObservationScheme& s);

using DistSet = std::set<FiniteDist<Value>>;

struct FrequentistComparison {
  bool equivalent = false;
  std::map<Value, DistSet> left;
  std::map<Value, DistSet> right;
  std::optional<Value> violating_target;
};

/// For each target value, the set of estimator laws over its preimage in m
/// equals the set in m*. Predictands use laws conditional on the predictand.
FrequentistComparison sampling_dist_equivalent(const Family& m, const Family& m_star, const Estimator& est,
                                               const TargetValues& tv, const TargetValues& tv_star,
                                               const ObservationScheme& s);

/// Prior weights over a family's members.
using Prior = std::vector<Rational>;
Prior uniform_prior(const Family& f);
/// Q* = Q (x) Q' on a Dirac-ignored family with Q' = int P^{Vbar} dQ; other
/// policies carry Q over to the member each P* came from.
Prior induced_prior(const Family& m, const Prior& q, const Family& m_star, const ProcessSplit& split,
                    const NuisancePolicy& policy);
/// Q* = Q (x) Q' for an explicit nuisance prior Q' on a Dirac-ignored family.
Prior product_prior(const Prior& q, const FiniteDist<Value>& nuisance_prior, const Family& m_star);

/// Posterior law of the target given x; nullopt on zero evidence.
std::optional<FiniteDist<Value>> posterior(const Family& m, const Prior& q, const TargetValues& tv,
                                           const ObservationScheme& s, const Value& x);

struct BayesComparison {
  bool equivalent = false;
  std::optional<Value> x;
  DistSet left;
  DistSet right;
};

/// Sets of posteriors coincide. Throws ZeroEvidence when x has zero mass
/// under every prior on both sides.
BayesComparison posterior_equivalent(const Family& m, const Family& m_star, const std::vector<Prior>& priors,
                                     const std::vector<Prior>& priors_star, const TargetValues& tv,
                                     const TargetValues& tv_star, const ObservationScheme& s, const Value& x);

struct Witness {
  std::string kind;
  std::string at;
  Value left;
  Value right;
  bool equal = true;
};

struct ReportFlags {
  bool z_contains_y = false;
  bool non_separated_grid = false;
  std::string local_vs_uniform;
  std::string policy;
  std::string omega;
  std::string split_status;
  std::string mar_variant;
  std::optional<bool> mar;
};

struct ClassificationReport {
  InferenceType inference_type = InferenceType::LikelihoodBased;
  Verdict verdict = Verdict::Ignorable;
  std::string target;
  std::string observation;
  std::optional<Value> x;
  std::optional<Rational> alpha;
  std::vector<Witness> witnesses;
  std::vector<Witness> conditional_laws;
  ReportFlags flags;

  friend bool operator==(const ClassificationReport&, const ClassificationReport&);
};

struct ClassifyOptions {
  NuisancePolicy policy = NuisancePolicy::dirac();
  MarVariant mar_variant = MarVariant::Local;
  OmegaMode omega = OmegaMode::Product;
  std::string estimator = "sample_mean";
  std::vector<Prior> priors;                        // default: uniform over the family
  std::vector<FiniteDist<Value>> nuisance_priors;   // default: the induced Q'
};

/// Builds m* under the policy, transforms the target, runs the matching
/// equivalence test and records every comparison as a witness.
ClassificationReport classify(const Family& m, const ProcessSplit& split, const ObservationScheme& s,
                              const std::optional<Value>& x, InferenceType type, const Target& target,
                              const ClassifyOptions& options = {});

/// P^{T[Y] | T = t} against P_theta^{t(Y)} for every member and selection of
/// positive mass.
std::vector<Witness> conditional_law_checks(const Family& m);

/// Encodes a distribution as a tuple of (outcome, weight) pairs.
Value dist_value(const FiniteDist<Value>& d);
Value table_value(const LikelihoodTable& t);

}  // namespace ilab
