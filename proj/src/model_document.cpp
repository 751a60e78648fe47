#include "ilab/model_document.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "ilab/ignorance.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

DocumentError::DocumentError(ErrorCode code, SourceLoc where, const std::string& rule)
    : Error(code, "line " + std::to_string(where.line) + ", column " + std::to_string(where.column) + ": " + rule),
      where_(where),
      rule_(rule) {}

SourceLoc KeyLocations::of(const std::string& key) const {
  const auto it = at.find(key);
  return it == at.end() ? SourceLoc{1, 1} : it->second;
}

std::optional<std::string> decimal_hint(std::string_view token) {
  static const std::regex decimal(R"(^([+-]?)([0-9]*)\.([0-9]+)$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(token.begin(), token.end(), m, decimal)) return std::nullopt;
  const std::string whole = m[2].str().empty() ? "0" : m[2].str();
  const std::string frac = m[3].str();
  mpz_class num(whole + frac, 10);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  if (m[1].str() == "-") num = -num;
  return Value(Rational(mpq_class(num, den))).text();
}

namespace {

constexpr const char* kVariants[] = {"census", "srs_wor", "srs_wr",     "poisson", "fixed",
                                     "stratified", "select_max", "mix", "cases"};
constexpr const char* kSchemes[] = {"values_only", "values_and_mapping", "values_mapping_design",
                                    "values_and_sampled_weights", "values_and_indicator"};
constexpr const char* kTargets[] = {"theta", "mean_y1", "population_mean", "signal", "model_index"};
constexpr const char* kSections[] = {"model", "grid", "population", "signal", "design", "observation", "target", "split"};

template <std::size_t N>
bool one_of(const std::string& s, const char* const (&names)[N]) {
  return std::any_of(std::begin(names), std::end(names), [&](const char* n) { return s == n; });
}

template <std::size_t N>
std::string joined(const char* const (&names)[N]) {
  std::string out;
  for (const char* n : names) out += (out.empty() ? "" : ", ") + std::string(n);
  return out;
}

[[noreturn]] void fail(ErrorCode code, SourceLoc at, const std::string& rule) { throw DocumentError(code, at, rule); }

std::string rat_text(const Rational& r) { return Value(r).text(); }

/// Scanner over one value string, reporting columns relative to the source line.
class Cursor {
 public:
  Cursor(std::string_view text, SourceLoc start) : text_(text), start_(start) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  SourceLoc loc() const { return {start_.line, start_.column + pos_}; }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      fail(ErrorCode::SyntaxError, loc(),
           std::string("expected '") + c + "'" + (done() ? " before end of value" : std::string(" near '") + rest() + "'"));
    }
  }
  void finish() {
    if (!done()) fail(ErrorCode::SyntaxError, loc(), "unexpected trailing text '" + rest() + "'");
  }

  /// One token: a parenthesized group, a quoted string, or a run of
  /// characters up to whitespace or one of , : ( ).
  std::pair<std::string, SourceLoc> atom() {
    skip_ws();
    const SourceLoc at = loc();
    const std::size_t begin = pos_;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      int depth = 0;
      bool quoted = false;
      for (; pos_ < text_.size(); ++pos_) {
        const char c = text_[pos_];
        if (quoted) {
          if (c == '\\') ++pos_;
          else if (c == '"') quoted = false;
        } else if (c == '"') {
          quoted = true;
        } else if (c == '(') {
          ++depth;
        } else if (c == ')' && --depth == 0) {
          ++pos_;
          break;
        }
      }
      if (depth != 0) fail(ErrorCode::SyntaxError, at, "unbalanced parentheses");
    } else if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') pos_ += text_[pos_] == '\\' ? 2 : 1;
      if (pos_ >= text_.size()) fail(ErrorCode::SyntaxError, at, "unterminated string");
      ++pos_;
    } else {
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ':' || c == '(' || c == ')') break;
        ++pos_;
      }
    }
    if (pos_ == begin) {
      fail(ErrorCode::SyntaxError, at, done() ? "expected a value" : "expected a value near '" + rest() + "'");
    }
    return {std::string(text_.substr(begin, pos_ - begin)), at};
  }

 private:
  std::string rest() const { return std::string(text_.substr(std::min(pos_, text_.size()))); }

  std::string_view text_;
  SourceLoc start_;
  std::size_t pos_ = 0;
};

Rational to_rational(const std::string& token, SourceLoc at) {
  if (auto hint = decimal_hint(token)) {
    fail(ErrorCode::BadRational, at, "decimal literal '" + token + "' is not exact; use " + *hint);
  }
  if (auto r = Rational::parse(token)) return *r;
  fail(ErrorCode::BadRational, at, "'" + token + "' is not an exact rational (write an integer or p/q)");
}

std::int64_t to_int(const std::string& token, SourceLoc at, const std::string& what) {
  const Rational r = to_rational(token, at);
  const auto i = r.to_int64();
  if (!i) fail(ErrorCode::SchemaError, at, what + " must be an integer, got " + token);
  return *i;
}

Value to_literal(const std::string& token, SourceLoc at) {
  if (auto hint = decimal_hint(token)) {
    fail(ErrorCode::BadRational, at, "decimal literal '" + token + "' is not exact; use " + *hint);
  }
  try {
    return parse_value(token);
  } catch (const Error& e) {
    fail(ErrorCode::SyntaxError, at, "malformed literal '" + token + "'");
  }
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

template <class Fn>
void for_each_item(Cursor& c, Fn&& item) {
  if (c.done()) fail(ErrorCode::SchemaError, c.loc(), "empty list");
  do {
    item(c);
  } while (c.accept(','));
  c.finish();
}

void check_unit_mass(const Rational& total, SourceLoc at, const std::string& what) {
  if (total != Rational(1)) fail(ErrorCode::SchemaError, at, what + " sum to " + rat_text(total) + ", expected 1");
}

struct Entry {
  std::string key;
  std::string value;
  SourceLoc key_at;
  SourceLoc value_at;
};

struct Section {
  std::string name;
  SourceLoc at;
  std::vector<Entry> entries;
};

std::vector<Section> split_sections(std::string_view text, std::size_t& line_count) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t last = line.find_last_not_of(" \t");
    const SourceLoc at{line_no, first + 1};
    if (line[first] == '[') {
      if (line[last] != ']') fail(ErrorCode::SyntaxError, at, "section header must end with ']'");
      std::string name = line.substr(first + 1, last - first - 1);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      if (!one_of(name, kSections)) {
        fail(ErrorCode::SchemaError, at, "unknown section [" + name + "] (known: " + joined(kSections) + ")");
      }
      if (!seen.insert(name).second) fail(ErrorCode::SchemaError, at, "duplicate section [" + name + "]");
      sections.push_back({name, at, {}});
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail(ErrorCode::SyntaxError, at, "expected 'key = value' or '[section]'");
      std::string key = line.substr(first, eq - first);
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key.empty()) fail(ErrorCode::SyntaxError, at, "missing key before '='");
      if (sections.empty()) fail(ErrorCode::SchemaError, at, "key '" + key + "' appears before any section");
      const std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
      const SourceLoc value_at{line_no, (vstart == std::string::npos ? eq + 1 : vstart) + 1};
      if (vstart == std::string::npos) fail(ErrorCode::SyntaxError, value_at, "missing value for '" + key + "'");
      Section& s = sections.back();
      for (const auto& e : s.entries) {
        if (e.key == key) fail(ErrorCode::SchemaError, at, "duplicate key '" + key + "' in [" + s.name + "]");
      }
      s.entries.push_back({key, line.substr(vstart, last + 1 - vstart), at, value_at});
    }
    if (end == text.size()) break;
  }
  line_count = line_no;
  return sections;
}

std::vector<GridEntry> parse_grid(const Entry& e) {
  std::vector<GridEntry> out;
  std::set<std::string> labels;
  Cursor c(e.value, e.value_at);
  for_each_item(c, [&](Cursor& cur) {
    auto [tok, at] = cur.atom();
    GridEntry g;
    if (cur.accept(':')) {
      if (!is_identifier(tok)) fail(ErrorCode::SchemaError, at, "grid label '" + tok + "' must be an identifier");
      auto [vtok, vat] = cur.atom();
      g.label = tok;
      g.value = to_rational(vtok, vat);
      g.explicit_label = true;
    } else if (decimal_hint(tok) || Rational::parse(tok)) {
      g.value = to_rational(tok, at);
      g.label = rat_text(*g.value);
    } else if (is_identifier(tok)) {
      g.label = tok;
    } else {
      fail(ErrorCode::SchemaError, at, "grid point '" + tok + "' is neither an exact rational nor a label");
    }
    if (!labels.insert(g.label).second) fail(ErrorCode::SchemaError, at, "duplicate grid label '" + g.label + "'");
    out.push_back(std::move(g));
  });
  return out;
}

DesignTerm parse_term(Cursor& c) {
  auto [name, at] = c.atom();
  if (!one_of(name, kVariants)) {
    fail(ErrorCode::UnknownDesignVariant, at, "unknown design variant '" + name + "' (known: " + joined(kVariants) + ")");
  }
  DesignTerm t;
  t.variant = name;
  t.where = at;
  if (c.accept('(') && !c.accept(')')) {
    do {
      if (name == "mix") {
        auto [wtok, wat] = c.atom();
        const Rational w = to_rational(wtok, wat);
        c.expect(':');
        t.components.emplace_back(w, parse_term(c));
      } else if (name == "cases") {
        auto [ktok, kat] = c.atom();
        Value key = to_literal(ktok, kat);
        c.expect(':');
        t.cases.emplace_back(std::move(key), parse_term(c));
      } else if (name == "stratified") {
        auto [htok, hat] = c.atom();
        const std::int64_t h = to_int(htok, hat, "stratum");
        c.expect(':');
        auto [ntok, nat] = c.atom();
        const std::int64_t n = to_int(ntok, nat, "allocation");
        if (n < 0) fail(ErrorCode::SchemaError, nat, "allocation must be non-negative");
        t.args.push_back(Value::tuple({Value(h), Value(n)}));
      } else {
        auto [tok, tat] = c.atom();
        t.args.push_back(to_literal(tok, tat));
      }
    } while (c.accept(','));
    c.expect(')');
  }

  const auto arity = [&](std::size_t lo, std::size_t hi) {
    const std::size_t n = t.args.size() + t.components.size() + t.cases.size();
    if (n < lo || n > hi) {
      fail(ErrorCode::SchemaError, at,
           name + " takes " + (lo == hi ? std::to_string(lo) : "at least " + std::to_string(lo)) + " argument(s), got " +
               std::to_string(n));
    }
  };
  if (name == "census" || name == "select_max") arity(0, 0);
  if (name == "srs_wor" || name == "srs_wr") {
    arity(1, 1);
    if (t.args[0].kind() != Value::Kind::Int || t.args[0].as_int() < 0) {
      fail(ErrorCode::SchemaError, at, name + " sample size must be a non-negative integer");
    }
  }
  if (name == "poisson") {
    arity(1, SIZE_MAX);
    for (const auto& p : t.args) {
      if (!p.is_number()) fail(ErrorCode::SchemaError, at, "poisson probabilities must be exact rationals");
    }
  }
  if (name == "fixed" || name == "stratified" || name == "mix" || name == "cases") arity(1, SIZE_MAX);
  if (name == "mix") {
    Rational total = 0;
    for (const auto& [w, _] : t.components) {
      if (w < Rational(0)) fail(ErrorCode::SchemaError, at, "mixture weights must be non-negative");
      total += w;
    }
    check_unit_mass(total, at, "mixture weights");
  }
  return t;
}

DesignTerm parse_term_value(const Entry& e) {
  Cursor c(e.value, e.value_at);
  DesignTerm t = parse_term(c);
  c.finish();
  return t;
}

void check_term_labels(const DesignTerm& t, const std::vector<Value>& units) {
  if (t.variant == "fixed") {
    for (const auto& l : t.args) {
      if (std::find(units.begin(), units.end(), l) == units.end()) {
        fail(ErrorCode::SchemaError, t.where, "fixed design names unit '" + l.text() + "' which is not in [population]");
      }
    }
  }
  if (t.variant == "poisson" && t.args.size() != units.size()) {
    fail(ErrorCode::SchemaError, t.where,
         "poisson needs one probability per unit (" + std::to_string(units.size()) + "), got " +
             std::to_string(t.args.size()));
  }
  if ((t.variant == "srs_wor") && static_cast<std::size_t>(t.args[0].as_int()) > units.size()) {
    fail(ErrorCode::SchemaError, t.where,
         "srs_wor sample size " + t.args[0].text() + " exceeds population size " + std::to_string(units.size()));
  }
  for (const auto& [_, sub] : t.components) check_term_labels(sub, units);
  for (const auto& [_, sub] : t.cases) check_term_labels(sub, units);
}

bool has_label(const std::vector<GridEntry>& grid, const std::string& label) {
  return std::any_of(grid.begin(), grid.end(), [&](const GridEntry& g) { return g.label == label; });
}

}  // namespace

std::string DesignTerm::text() const {
  std::string out = variant;
  if (args.empty() && components.empty() && cases.empty()) return out;
  out += "(";
  bool first = true;
  const auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& a : args) {
    sep();
    out += variant == "stratified" ? a[0].text() + ": " + a[1].text() : a.text();
  }
  for (const auto& [w, t] : components) {
    sep();
    out += rat_text(w) + ": " + t.text();
  }
  for (const auto& [k, t] : cases) {
    sep();
    out += k.text() + ": " + t.text();
  }
  return out + ")";
}

std::vector<Value> ModelDocument::unit_labels() const {
  if (!population_size) return labels;
  std::vector<Value> out;
  for (std::size_t i = 1; i <= *population_size; ++i) out.emplace_back(static_cast<std::int64_t>(i));
  return out;
}

std::vector<GridEntry> ModelDocument::phi_points() const {
  if (phi) return *phi;
  return {GridEntry{"-", std::nullopt, false}};
}

ModelDocument parse_model(std::string_view text) {
  std::size_t line_count = 0;
  const auto sections = split_sections(text, line_count);
  const SourceLoc eof{line_count + 1, 1};

  ModelDocument d;
  std::map<std::string, const Section*> by_name;
  for (const auto& s : sections) by_name[s.name] = &s;
  const auto entries = [&](const std::string& name) -> const std::vector<Entry>& {
    static const std::vector<Entry> none;
    const auto it = by_name.find(name);
    return it == by_name.end() ? none : it->second->entries;
  };
  const auto require = [&](const std::string& section) -> const Section& {
    const auto it = by_name.find(section);
    if (it == by_name.end()) fail(ErrorCode::SchemaError, eof, "missing required section [" + section + "]");
    return *it->second;
  };
  const auto find = [&](const std::string& section, const std::string& key) -> const Entry* {
    for (const auto& e : entries(section)) {
      if (e.key == key) return &e;
    }
    return nullptr;
  };
  const auto unknown_key = [&](const std::string& section, const Entry& e, const std::string& known) {
    fail(ErrorCode::SchemaError, e.key_at, "unknown key '" + e.key + "' in [" + section + "] (known: " + known + ")");
  };
  const auto note = [&](const std::string& section, const Entry& e) {
    d.locations.at[section + "." + e.key] = e.value_at;
  };
  const auto word = [&](const Entry& e) {
    Cursor c(e.value, e.value_at);
    auto [tok, at] = c.atom();
    c.finish();
    return std::make_pair(tok, at);
  };

  // [model]
  for (const auto& e : entries("model")) {
    if (e.key != "name") unknown_key("model", e, "name");
    d.name = e.value;
    note("model", e);
  }

  // [grid] first: other sections reference its labels.
  const Section& grid = require("grid");
  for (const auto& e : grid.entries) {
    note("grid", e);
    if (e.key == "theta") d.theta = parse_grid(e);
    else if (e.key == "phi") d.phi = parse_grid(e);
    else if (e.key != "gamma") unknown_key("grid", e, "theta, phi, gamma");
  }
  if (d.theta.empty()) fail(ErrorCode::SchemaError, grid.at, "[grid] needs 'theta'");
  const auto phis = d.phi_points();
  if (const Entry* e = find("grid", "gamma")) {
    Cursor c(e->value, e->value_at);
    auto [first, at] = c.atom();
    if ((first == "product" || first == "diagonal") && c.done()) {
      if (first == "diagonal" && d.theta.size() != phis.size()) {
        fail(ErrorCode::SchemaError, at, "diagonal gamma needs theta and phi grids of equal size");
      }
      d.gamma_mode = first;
    } else {
      Cursor again(e->value, e->value_at);
      std::vector<std::pair<std::string, std::string>> pairs;
      for_each_item(again, [&](Cursor& cur) {
        auto [t, tat] = cur.atom();
        cur.expect(':');
        auto [p, pat] = cur.atom();
        if (auto r = Rational::parse(t)) t = rat_text(*r);
        if (auto r = Rational::parse(p)) p = rat_text(*r);
        if (!has_label(d.theta, t)) fail(ErrorCode::SchemaError, tat, "gamma names unknown theta '" + t + "'");
        if (!has_label(phis, p)) fail(ErrorCode::SchemaError, pat, "gamma names unknown phi '" + p + "'");
        pairs.emplace_back(t, p);
      });
      d.gamma_pairs = std::move(pairs);
    }
  }

  // [population]
  const Section& pop = require("population");
  for (const auto& e : pop.entries) {
    note("population", e);
    if (e.key == "size") {
      auto [tok, at] = word(e);
      const std::int64_t n = to_int(tok, at, "population size");
      if (n < 1) fail(ErrorCode::SchemaError, at, "population size must be at least 1");
      d.population_size = static_cast<std::size_t>(n);
    } else if (e.key == "labels") {
      Cursor c(e.value, e.value_at);
      for_each_item(c, [&](Cursor& cur) {
        auto [tok, at] = cur.atom();
        Value label = to_literal(tok, at);
        if (std::find(d.labels.begin(), d.labels.end(), label) != d.labels.end()) {
          fail(ErrorCode::SchemaError, at, "duplicate unit label '" + label.text() + "'");
        }
        d.labels.push_back(std::move(label));
      });
    } else {
      unknown_key("population", e, "labels, size");
    }
  }
  if (d.population_size && !d.labels.empty()) {
    fail(ErrorCode::SchemaError, pop.at, "[population] takes either 'labels' or 'size', not both");
  }
  if (!d.population_size && d.labels.empty()) fail(ErrorCode::SchemaError, pop.at, "[population] needs 'labels' or 'size'");
  const auto units = d.unit_labels();

  // [signal]
  const Section& sig = require("signal");
  for (const auto& e : sig.entries) {
    note("signal", e);
    if (e.key == "alphabet") {
      Cursor c(e.value, e.value_at);
      for_each_item(c, [&](Cursor& cur) {
        auto [tok, at] = cur.atom();
        const std::int64_t a = to_int(tok, at, "alphabet symbol");
        if (std::find(d.alphabet.begin(), d.alphabet.end(), a) != d.alphabet.end()) {
          fail(ErrorCode::SchemaError, at, "duplicate alphabet symbol " + tok);
        }
        d.alphabet.push_back(a);
      });
    }
  }
  if (d.alphabet.empty()) fail(ErrorCode::SchemaError, sig.at, "[signal] needs 'alphabet'");
  for (const auto& e : sig.entries) {
    if (e.key == "alphabet") continue;
    if (e.key == "law") {
      auto [tok, at] = word(e);
      if (tok != "bernoulli" && tok != "uniform" && tok != "table") {
        fail(ErrorCode::SchemaError, at, "unknown signal law '" + tok + "' (known: bernoulli, uniform, table)");
      }
      d.law = tok;
    } else if (e.key == "z") {
      Cursor c(e.value, e.value_at);
      auto [tok, at] = c.atom();
      if (tok == "none" || tok == "signal") {
        d.z = tok;
      } else if (tok == "fixed") {
        c.expect('(');
        auto [lit, lat] = c.atom();
        d.z = "fixed(" + to_literal(lit, lat).text() + ")";
        c.expect(')');
      } else {
        fail(ErrorCode::SchemaError, at, "design variable must be none, signal or fixed(<literal>)");
      }
      c.finish();
    } else if (e.key.rfind("marginal.", 0) == 0 || e.key.rfind("joint.", 0) == 0) {
      const bool marginal = e.key[0] == 'm';
      std::string label = e.key.substr(e.key.find('.') + 1);
      if (auto r = Rational::parse(label)) label = rat_text(*r);
      if (!has_label(d.theta, label)) {
        fail(ErrorCode::SchemaError, e.key_at, "'" + e.key + "' names unknown theta '" + label + "'");
      }
      const bool dup = std::any_of(d.marginals.begin(), d.marginals.end(), [&](auto& m) { return m.first == label; }) ||
                       std::any_of(d.joints.begin(), d.joints.end(), [&](auto& j) { return j.first == label; });
      if (dup) fail(ErrorCode::SchemaError, e.key_at, "theta '" + label + "' already has a signal table");
      Rational total = 0;
      Cursor c(e.value, e.value_at);
      if (marginal) {
        std::vector<std::pair<std::int64_t, Rational>> table;
        for_each_item(c, [&](Cursor& cur) {
          auto [ktok, kat] = cur.atom();
          const std::int64_t a = to_int(ktok, kat, "alphabet symbol");
          if (std::find(d.alphabet.begin(), d.alphabet.end(), a) == d.alphabet.end()) {
            fail(ErrorCode::SchemaError, kat, "symbol " + ktok + " is not in the alphabet");
          }
          if (std::any_of(table.begin(), table.end(), [&](auto& p) { return p.first == a; })) {
            fail(ErrorCode::SchemaError, kat, "duplicate symbol " + ktok);
          }
          cur.expect(':');
          auto [wtok, wat] = cur.atom();
          const Rational w = to_rational(wtok, wat);
          if (w < Rational(0)) fail(ErrorCode::SchemaError, wat, "probabilities must be non-negative");
          total += w;
          table.emplace_back(a, w);
        });
        d.marginals.emplace_back(label, std::move(table));
      } else {
        std::vector<std::pair<Value, Rational>> table;
        for_each_item(c, [&](Cursor& cur) {
          auto [ktok, kat] = cur.atom();
          Value y = to_literal(ktok, kat);
          if (!y.is_tuple() || y.size() != units.size()) {
            fail(ErrorCode::SchemaError, kat, "joint entry must be a tuple of " + std::to_string(units.size()) + " symbols");
          }
          for (const auto& s : y.items()) {
            if (s.kind() != Value::Kind::Int ||
                std::find(d.alphabet.begin(), d.alphabet.end(), s.as_int()) == d.alphabet.end()) {
              fail(ErrorCode::SchemaError, kat, "symbol " + s.text() + " is not in the alphabet");
            }
          }
          if (std::any_of(table.begin(), table.end(), [&](auto& p) { return p.first == y; })) {
            fail(ErrorCode::SchemaError, kat, "duplicate signal " + y.text());
          }
          cur.expect(':');
          auto [wtok, wat] = cur.atom();
          const Rational w = to_rational(wtok, wat);
          if (w < Rational(0)) fail(ErrorCode::SchemaError, wat, "probabilities must be non-negative");
          total += w;
          table.emplace_back(std::move(y), w);
        });
        d.joints.emplace_back(label, std::move(table));
      }
      check_unit_mass(total, e.value_at, "signal probabilities");
    } else {
      unknown_key("signal", e, "alphabet, law, z, marginal.<theta>, joint.<theta>");
    }
  }
  if (d.law.empty()) fail(ErrorCode::SchemaError, sig.at, "[signal] needs 'law'");
  if (d.law == "bernoulli") {
    const Entry* law = find("signal", "law");
    if (d.alphabet.size() != 2) fail(ErrorCode::SchemaError, law->value_at, "bernoulli law needs a 2-symbol alphabet");
    for (const auto& g : d.theta) {
      if (!g.value || *g.value < Rational(0) || *g.value > Rational(1)) {
        fail(ErrorCode::SchemaError, law->value_at, "bernoulli law needs every theta to be a probability; '" + g.label + "' is not");
      }
    }
  }
  if (d.law != "table" && (!d.marginals.empty() || !d.joints.empty())) {
    fail(ErrorCode::SchemaError, find("signal", "law")->value_at, "signal tables require law = table");
  }
  if (d.law == "table") {
    for (const auto& g : d.theta) {
      const bool covered = std::any_of(d.marginals.begin(), d.marginals.end(), [&](auto& m) { return m.first == g.label; }) ||
                           std::any_of(d.joints.begin(), d.joints.end(), [&](auto& j) { return j.first == g.label; });
      if (!covered) {
        fail(ErrorCode::SchemaError, sig.at, "law = table but theta '" + g.label + "' has no marginal or joint table");
      }
    }
  }

  // [design]
  const Section& des = require("design");
  for (const auto& e : des.entries) {
    note("design", e);
    if (e.key == "variant") {
      d.design = parse_term_value(e);
    } else if (e.key.rfind("variant.", 0) == 0) {
      std::string label = e.key.substr(8);
      if (auto r = Rational::parse(label)) label = rat_text(*r);
      if (!has_label(phis, label)) {
        fail(ErrorCode::SchemaError, e.key_at, "'" + e.key + "' names unknown phi '" + label + "'");
      }
      if (std::any_of(d.design_per_phi.begin(), d.design_per_phi.end(), [&](auto& p) { return p.first == label; })) {
        fail(ErrorCode::SchemaError, e.key_at, "phi '" + label + "' already has a design");
      }
      d.design_per_phi.emplace_back(label, parse_term_value(e));
    } else {
      unknown_key("design", e, "variant, variant.<phi>");
    }
  }
  if (!d.design) {
    for (const auto& g : phis) {
      if (std::none_of(d.design_per_phi.begin(), d.design_per_phi.end(), [&](auto& p) { return p.first == g.label; })) {
        fail(ErrorCode::SchemaError, des.at, "no design for phi '" + g.label + "' and no default 'variant'");
      }
    }
    if (d.design_per_phi.empty()) fail(ErrorCode::SchemaError, des.at, "[design] needs 'variant'");
  }
  if (d.design) check_term_labels(*d.design, units);
  for (const auto& [_, t] : d.design_per_phi) check_term_labels(t, units);

  // [observation]
  const Section& obs = require("observation");
  for (const auto& e : obs.entries) {
    note("observation", e);
    if (e.key == "scheme") {
      Cursor c(e.value, e.value_at);
      auto [tok, at] = c.atom();
      if (tok == "custom") {
        c.expect('(');
        auto [name, nat] = c.atom();
        c.expect(')');
        if (!builtin_custom_observation(name)) {
          fail(ErrorCode::SchemaError, nat, "unknown custom observation '" + name + "' (known: sample_size, indicator, sample_sum)");
        }
        d.scheme = "custom(" + name + ")";
      } else if (one_of(tok, kSchemes)) {
        d.scheme = tok;
      } else {
        fail(ErrorCode::SchemaError, at, "unknown observation scheme '" + tok + "' (known: " + joined(kSchemes) + ", custom(<name>))");
      }
      c.finish();
    } else if (e.key == "unordered") {
      auto [tok, at] = word(e);
      if (tok != "true" && tok != "false") fail(ErrorCode::SchemaError, at, "unordered must be true or false");
      d.unordered = tok == "true";
    } else {
      unknown_key("observation", e, "scheme, unordered");
    }
  }
  if (d.scheme.empty()) fail(ErrorCode::SchemaError, obs.at, "[observation] needs 'scheme'");

  // [target]
  for (const auto& e : entries("target")) {
    note("target", e);
    if (e.key != "name") unknown_key("target", e, "name");
    auto [tok, at] = word(e);
    if (!one_of(tok, kTargets)) fail(ErrorCode::SchemaError, at, "unknown target '" + tok + "' (known: " + joined(kTargets) + ")");
    d.target = tok;
  }

  // [split]
  const Population population(units);
  for (const auto& e : entries("split")) {
    note("split", e);
    if (e.key != "v" && e.key != "v_bar") unknown_key("split", e, "v, v_bar");
    try {
      (void)make_variable(e.value, population);
    } catch (const Error& err) {
      fail(ErrorCode::SchemaError, e.value_at,
           "unknown variable '" + e.value +
               "' (known: signal, design_variable, selection, values_on_sample, indicator, constant, unit<k>, (a, b))");
    }
    (e.key == "v" ? d.split_v : d.split_v_bar) = e.value;
  }
  if (d.split_v.has_value() != d.split_v_bar.has_value()) {
    fail(ErrorCode::SchemaError, by_name.at("split")->at, "[split] needs both 'v' and 'v_bar'");
  }
  return d;
}

ModelDocument parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

namespace {

std::string grid_text(const std::vector<GridEntry>& grid) {
  std::string out;
  for (const auto& g : grid) {
    if (!out.empty()) out += ", ";
    if (g.explicit_label) out += g.label + ": " + rat_text(*g.value);
    else out += g.value ? rat_text(*g.value) : g.label;
  }
  return out;
}

}  // namespace

std::string emit_model(const ModelDocument& d) {
  std::ostringstream os;
  bool first_section = true;
  const auto section = [&](const char* name) {
    if (!first_section) os << '\n';
    first_section = false;
    os << '[' << name << "]\n";
  };

  if (d.name) {
    section("model");
    os << "name = " << *d.name << '\n';
  }

  section("population");
  if (d.population_size) {
    os << "size = " << *d.population_size << '\n';
  } else {
    os << "labels = ";
    for (std::size_t i = 0; i < d.labels.size(); ++i) os << (i ? ", " : "") << d.labels[i].text();
    os << '\n';
  }

  section("signal");
  os << "alphabet = ";
  for (std::size_t i = 0; i < d.alphabet.size(); ++i) os << (i ? ", " : "") << d.alphabet[i];
  os << "\nlaw = " << d.law << '\n';
  if (d.z) os << "z = " << *d.z << '\n';
  for (const auto& [label, table] : d.marginals) {
    os << "marginal." << label << " = ";
    for (std::size_t i = 0; i < table.size(); ++i) os << (i ? ", " : "") << table[i].first << ": " << rat_text(table[i].second);
    os << '\n';
  }
  for (const auto& [label, table] : d.joints) {
    os << "joint." << label << " = ";
    for (std::size_t i = 0; i < table.size(); ++i) {
      os << (i ? ", " : "") << table[i].first.text() << ": " << rat_text(table[i].second);
    }
    os << '\n';
  }

  section("grid");
  os << "theta = " << grid_text(d.theta) << '\n';
  if (d.phi) os << "phi = " << grid_text(*d.phi) << '\n';
  if (d.gamma_mode) os << "gamma = " << *d.gamma_mode << '\n';
  if (d.gamma_pairs) {
    os << "gamma = ";
    for (std::size_t i = 0; i < d.gamma_pairs->size(); ++i) {
      os << (i ? ", " : "") << (*d.gamma_pairs)[i].first << ": " << (*d.gamma_pairs)[i].second;
    }
    os << '\n';
  }

  section("design");
  if (d.design) os << "variant = " << d.design->text() << '\n';
  for (const auto& [label, t] : d.design_per_phi) os << "variant." << label << " = " << t.text() << '\n';

  section("observation");
  os << "scheme = " << d.scheme << '\n';
  if (d.unordered) os << "unordered = " << (*d.unordered ? "true" : "false") << '\n';

  if (d.target) {
    section("target");
    os << "name = " << *d.target << '\n';
  }
  if (d.split_v) {
    section("split");
    os << "v = " << *d.split_v << "\nv_bar = " << *d.split_v_bar << '\n';
  }
  return os.str();
}

}  // namespace ilab
