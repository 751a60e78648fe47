#pragma once

// The X = x(T[Y], T, Z) survey model: populations, signals, selections,
// designs, observation schemes and exact joint / observation laws.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/value.hpp"

namespace ilab {

/// Finite labeled population U. Units are addressed by 0-based index; labels
/// are only for display and observation encoding.
class Population {
 public:
  Population() = default;
  explicit Population(std::vector<Value> labels);
  /// Labels 1..n.
  static Population range(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::vector<Value>& labels() const { return labels_; }
  const Value& label(std::size_t unit) const { return labels_.at(unit); }
  /// Index of a label; throws InvalidArgument when absent.
  std::size_t index_of(const Value& label) const;

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::vector<Value> labels_;
};

/// y : U -> Y', one alphabet value per unit.
using Signal = std::vector<std::int64_t>;

/// r : {1..n} -> U stored as 0-based unit indices in draw order.
struct SelectionMapping {
  std::vector<std::size_t> units;

  std::size_t n() const { return units.size(); }
  bool injective() const;
  friend auto operator<=>(const SelectionMapping&, const SelectionMapping&) = default;
};

/// Builds a mapping from 1-based unit labels of Population::range.
SelectionMapping mapping_from_labels(const Population& population, const std::vector<Value>& labels);
Value mapping_labels(const SelectionMapping& r, const Population& population);

struct WorldState {
  Signal y;
  Value z;
  SelectionMapping r;

  friend auto operator<=>(const WorldState&, const WorldState&) = default;
};

Value signal_value(const Signal& y);
Signal signal_from_value(const Value& v);
/// (y, z, r) as a structural value; used for canonical encodings and reports.
Value world_value(const WorldState& w, const Population& population);

std::vector<int> indicator_vector(const SelectionMapping& r, std::size_t population_size);
std::vector<std::size_t> count_vector(const SelectionMapping& r, std::size_t population_size);

using Design = FiniteDist<SelectionMapping>;

std::vector<Rational> inclusion_probabilities(const Design& design, std::size_t population_size);
std::vector<Rational> selection_expectations(const Design& design, std::size_t population_size);
Rational expected_distinct_size(const Design& design);
Rational expected_size(const Design& design);
/// True iff every mapping of positive probability is injective.
bool without_replacement(const Design& design);

/// Conditional law of the selection given the design variable z. A kernel
/// that needs y reads it through z, which the model then declares as
/// containing y.
class DesignKernel {
 public:
  using Fn = std::function<Design(const Value& z)>;

  DesignKernel() = default;
  DesignKernel(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  /// A design that ignores z entirely.
  static DesignKernel constant(std::string name, Design design);

  Design operator()(const Value& z) const;
  const std::string& name() const { return name_; }
  bool ignores_z() const { return constant_.has_value(); }

 private:
  std::string name_;
  Fn fn_;
  std::optional<Design> constant_;
};

struct GridPoint {
  std::string label;
  std::optional<Rational> value;
};

using SignalZ = std::pair<Signal, Value>;

/// Parametric family {P_gamma : gamma in Gamma}. Gamma is a subset of the
/// product of the theta and phi grids; the signal law reads theta, the design
/// kernel reads phi. The selection kernel only ever sees z.
struct SurveyModel {
  Population population;
  std::vector<GridPoint> theta_grid;
  std::vector<GridPoint> phi_grid;
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  std::vector<FiniteDist<SignalZ>> signal_laws;  // one per theta
  std::vector<DesignKernel> designs;             // one per phi
  bool z_contains_y = false;

  /// Validates sizes and defaults Gamma to the full product when empty.
  void finalize();
  std::size_t theta_index(const std::string& label) const;
  std::size_t phi_index(const std::string& label) const;
  bool in_grid(std::size_t theta, std::size_t phi) const;
  std::string grid_label(std::size_t theta, std::size_t phi) const;
};

/// Joint law of (y, z, r) at (theta, phi): signal law then the design kernel
/// applied to z. Throws GridMiss outside Gamma.
FiniteDist<WorldState> build_joint(const SurveyModel& m, std::size_t theta, std::size_t phi);

enum class SchemeTag {
  ValuesOnly,
  ValuesAndMapping,
  ValuesMappingDesign,
  ValuesAndSampledWeights,
  ValuesAndIndicator,
  Custom,
};

struct ObservationScheme {
  using CustomFn = std::function<Value(const WorldState&, const Population&)>;

  SchemeTag tag = SchemeTag::ValuesOnly;
  /// Sorts the drawn values (or value/weight pairs), erasing draw order.
  bool unordered = false;
  std::string custom_name;
  CustomFn custom;

  static ObservationScheme values_only(bool unordered = false) { return {SchemeTag::ValuesOnly, unordered, {}, {}}; }
  static ObservationScheme values_and_mapping() { return {SchemeTag::ValuesAndMapping, false, {}, {}}; }
  static ObservationScheme of_custom(std::string name, CustomFn fn) {
    return {SchemeTag::Custom, false, std::move(name), std::move(fn)};
  }
  std::string name() const;
};

/// Custom observation functions addressable by name from model files.
std::optional<ObservationScheme::CustomFn> builtin_custom_observation(const std::string& name);

/// x(T[Y], T, Z). `inclusion` is the realized design's pi vector, required
/// only by ValuesAndSampledWeights.
Value observe(const WorldState& w, const ObservationScheme& s, const Population& population,
              const std::vector<Rational>* inclusion = nullptr);

FiniteDist<Value> observation_distribution(const SurveyModel& m, std::size_t theta, std::size_t phi,
                                           const ObservationScheme& s);

/// One member of a (possibly transformed) model family: a joint law over
/// worlds plus the grid point it came from. Members of an ignored model also
/// carry the nuisance coordinate they were built with.
struct Member {
  std::string label;
  std::size_t theta = 0;
  std::size_t phi = 0;
  std::optional<Value> nuisance;
  std::size_t origin = 0;  // index of the member of the base family it came from
  FiniteDist<WorldState> joint;
};

struct Family {
  std::shared_ptr<const SurveyModel> model;
  std::vector<Member> members;
};

Family family_of(std::shared_ptr<const SurveyModel> model);

FiniteDist<Value> observation_distribution(const Family& family, const Member& member, const ObservationScheme& s);

/// Law of the signal under a member.
FiniteDist<Signal> signal_marginal(const Member& member);

}  // namespace ilab
