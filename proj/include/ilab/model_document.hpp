#pragma once

// Model files: a small sectioned key = value format.
//
//   # comment
//   [model]        name
//   [population]   labels = 1, 2, 3            | size = 3
//   [signal]       alphabet = 0, 1
//                  law = bernoulli | uniform | table
//                  z = none | signal | fixed(<literal>)
//                  marginal.<theta> = 0: 2/3, 1: 1/3       (law = table, iid)
//                  joint.<theta> = (0, 0): 1/4, ...         (law = table)
//   [grid]         theta = 1/3, 1/2 | low: 1/3, high: 1/2 | a, b
//                  phi = ...
//                  gamma = product | diagonal | <theta>: <phi>, ...
//   [design]       variant = <design term>
//                  variant.<phi> = <design term>
//   [observation]  scheme = values_only | values_and_mapping | ... | custom(<name>)
//                  unordered = true | false
//   [target]       name = mean_y1 | theta | population_mean | signal | model_index
//   [split]        v = <variable>
//                  v_bar = <variable>
//
// Design terms: census, srs_wor(n), srs_wr(n), poisson(p_1, ..., p_N),
// fixed(label, ...), stratified(h: n_h, ...), select_max,
// mix(w: term, ...), cases(<z literal>: term, ...).
//
// Numbers are exact: integers or p/q. Every diagnostic carries line:column.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ilab/error.hpp"
#include "ilab/rational.hpp"
#include "ilab/value.hpp"

namespace ilab {

struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

/// Located parse / schema failure. what() reads "<Code>: line L, column C: <rule>".
class DocumentError : public Error {
 public:
  DocumentError(ErrorCode code, SourceLoc where, const std::string& rule);
  const SourceLoc& where() const { return where_; }
  const std::string& rule() const { return rule_; }

 private:
  SourceLoc where_;
  std::string rule_;
};

struct GridEntry {
  std::string label;
  std::optional<Rational> value;
  /// True when the file wrote "label: value" rather than a bare value.
  bool explicit_label = false;
  friend bool operator==(const GridEntry&, const GridEntry&) = default;
};

struct DesignTerm {
  std::string variant;
  std::vector<Value> args;                                    // numbers, labels, (h, n) pairs
  std::vector<std::pair<Rational, DesignTerm>> components;    // mix
  std::vector<std::pair<Value, DesignTerm>> cases;            // cases
  SourceLoc where;

  std::string text() const;
  friend bool operator==(const DesignTerm& a, const DesignTerm& b) {
    return a.variant == b.variant && a.args == b.args && a.components == b.components && a.cases == b.cases;
  }
};

/// Source positions of keys, kept out of document equality.
struct KeyLocations {
  std::map<std::string, SourceLoc> at;
  SourceLoc of(const std::string& key) const;
  friend bool operator==(const KeyLocations&, const KeyLocations&) { return true; }
};

struct ModelDocument {
  std::optional<std::string> name;

  std::optional<std::size_t> population_size;
  std::vector<Value> labels;

  std::vector<std::int64_t> alphabet;
  std::string law;
  std::optional<std::string> z;  // "none", "signal" or the fixed literal
  std::vector<std::pair<std::string, std::vector<std::pair<std::int64_t, Rational>>>> marginals;
  std::vector<std::pair<std::string, std::vector<std::pair<Value, Rational>>>> joints;

  std::vector<GridEntry> theta;
  std::optional<std::vector<GridEntry>> phi;
  std::optional<std::string> gamma_mode;
  std::optional<std::vector<std::pair<std::string, std::string>>> gamma_pairs;

  std::optional<DesignTerm> design;
  std::vector<std::pair<std::string, DesignTerm>> design_per_phi;

  std::string scheme;
  std::optional<bool> unordered;
  std::optional<std::string> target;
  std::optional<std::string> split_v;
  std::optional<std::string> split_v_bar;

  KeyLocations locations;

  /// Population labels, expanding `size = N` to 1..N.
  std::vector<Value> unit_labels() const;
  /// The phi grid, or the single unlabeled point "-" when absent.
  std::vector<GridEntry> phi_points() const;

  friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// Parses and schema-checks a document. Throws DocumentError.
ModelDocument parse_model(std::string_view text);
ModelDocument parse_model_file(const std::string& path);

/// Canonical text: fixed section and key order, ", " list separators and
/// ": " pair separators. parse_model(emit_model(d)) == d.
std::string emit_model(const ModelDocument& d);

/// Hint for decimal literals: "0.25" -> "1/4".
std::optional<std::string> decimal_hint(std::string_view token);

}  // namespace ilab
