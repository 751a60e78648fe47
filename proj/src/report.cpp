#include "ilab/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ilab/error.hpp"

namespace ilab {

namespace {

Rational rational_from(const Json& j) {
  auto r = Rational::parse(j.get<std::string>());
  if (!r) throw Error(ErrorCode::BadRational, "report field '" + j.get<std::string>() + "' is not p/q");
  return *r;
}

Json witness_json(const Witness& w) {
  return Json{{"kind", w.kind}, {"at", w.at}, {"left", w.left.text()}, {"right", w.right.text()}, {"equal", w.equal}};
}

Witness witness_from(const Json& j) {
  return Witness{j.at("kind").get<std::string>(), j.at("at").get<std::string>(),
                 parse_value(j.at("left").get<std::string>()), parse_value(j.at("right").get<std::string>()),
                 j.at("equal").get<bool>()};
}

InferenceType inference_from(const std::string& s) {
  for (auto t : {InferenceType::LikelihoodBased, InferenceType::FrequentistEstimation, InferenceType::Bayesian}) {
    if (inference_type_name(t) == s) return t;
  }
  throw Error(ErrorCode::SchemaError, "unknown inference type '" + s + "'");
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

/// A table value: a non-empty tuple of (outcome, number) pairs.
bool is_table(const Value& v) {
  if (!v.is_tuple() || v.size() == 0) return false;
  return std::all_of(v.items().begin(), v.items().end(),
                     [](const Value& row) { return row.is_tuple() && row.size() == 2 && row[1].is_number(); });
}

/// Missing cells (the empty tuple) print as "-".
std::string cell_text(const Value& v) { return v.is_number() ? v.text() : "-"; }

/// ignored / model, when both sides are numbers and the model side is positive.
std::string ratio_text(const Value& left, const Value& right) {
  if (!left.is_number() || !right.is_number() || left.as_rational().sign() <= 0) return "";
  return Value(right.as_rational() / left.as_rational()).text();
}

std::string fixed_text(double v, int digits = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

Json to_json(const ClassificationReport& r) {
  Json j;
  j["inference"] = inference_type_name(r.inference_type);
  j["verdict"] = verdict_name(r.verdict);
  j["target"] = r.target;
  j["observation"] = r.observation;
  j["x"] = r.x ? Json(r.x->text()) : Json(nullptr);
  j["alpha"] = r.alpha ? Json(r.alpha->str()) : Json(nullptr);
  j["witnesses"] = Json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(witness_json(w));
  j["conditional_laws"] = Json::array();
  for (const auto& w : r.conditional_laws) j["conditional_laws"].push_back(witness_json(w));
  Json f;
  f["z_contains_y"] = r.flags.z_contains_y;
  f["non_separated_grid"] = r.flags.non_separated_grid;
  f["local_vs_uniform"] = r.flags.local_vs_uniform;
  f["policy"] = r.flags.policy;
  f["omega"] = r.flags.omega;
  f["split_status"] = r.flags.split_status;
  f["mar_variant"] = r.flags.mar_variant;
  f["mar"] = r.flags.mar ? Json(*r.flags.mar) : Json(nullptr);
  j["flags"] = f;
  return j;
}

ClassificationReport classification_from_json(const Json& j) {
  ClassificationReport r;
  r.inference_type = inference_from(j.at("inference").get<std::string>());
  const std::string verdict = j.at("verdict").get<std::string>();
  if (verdict != "ignorable" && verdict != "informative") {
    throw Error(ErrorCode::SchemaError, "unknown verdict '" + verdict + "'");
  }
  r.verdict = verdict == "ignorable" ? Verdict::Ignorable : Verdict::Informative;
  r.target = j.at("target").get<std::string>();
  r.observation = j.at("observation").get<std::string>();
  if (!j.at("x").is_null()) r.x = parse_value(j.at("x").get<std::string>());
  if (!j.at("alpha").is_null()) r.alpha = rational_from(j.at("alpha"));
  for (const auto& w : j.at("witnesses")) r.witnesses.push_back(witness_from(w));
  for (const auto& w : j.at("conditional_laws")) r.conditional_laws.push_back(witness_from(w));
  const Json& f = j.at("flags");
  r.flags.z_contains_y = f.at("z_contains_y").get<bool>();
  r.flags.non_separated_grid = f.at("non_separated_grid").get<bool>();
  r.flags.local_vs_uniform = f.at("local_vs_uniform").get<std::string>();
  r.flags.policy = f.at("policy").get<std::string>();
  r.flags.omega = f.at("omega").get<std::string>();
  r.flags.split_status = f.at("split_status").get<std::string>();
  r.flags.mar_variant = f.at("mar_variant").get<std::string>();
  if (!f.at("mar").is_null()) r.flags.mar = f.at("mar").get<bool>();
  return r;
}

Json to_json(const McReport& r) {
  Json j;
  j["grid_point"] = r.grid_point;
  j["observation"] = r.observation;
  j["draws"] = r.draws;
  j["seed"] = r.seed;
  j["max_abs_deviation"] = r.max_abs_deviation;
  j["three_sigma_bound"] = r.three_sigma_bound;
  j["outside"] = r.outside();
  j["cells"] = Json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back(Json{{"outcome", c.outcome.text()},
                              {"exact", c.exact.str()},
                              {"count", c.count},
                              {"frequency", c.frequency},
                              {"deviation", c.deviation},
                              {"band", c.band},
                              {"within", c.within}});
  }
  return j;
}

McReport mc_report_from_json(const Json& j) {
  McReport r;
  r.grid_point = j.at("grid_point").get<std::string>();
  r.observation = j.at("observation").get<std::string>();
  r.draws = j.at("draws").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.max_abs_deviation = j.at("max_abs_deviation").get<double>();
  r.three_sigma_bound = j.at("three_sigma_bound").get<double>();
  for (const auto& c : j.at("cells")) {
    McCell cell;
    cell.outcome = parse_value(c.at("outcome").get<std::string>());
    cell.exact = rational_from(c.at("exact"));
    cell.count = c.at("count").get<std::uint64_t>();
    cell.frequency = c.at("frequency").get<double>();
    cell.deviation = c.at("deviation").get<double>();
    cell.band = c.at("band").get<double>();
    cell.within = c.at("within").get<bool>();
    r.cells.push_back(std::move(cell));
  }
  return r;
}

Json to_json(const RubinAudit& a) {
  Json j;
  j["model"] = a.name;
  j["records"] = Json::array();
  Json totals = Json::object();
  for (const char* t : {"6.1", "6.2", "6.3", "7.1", "7.2"}) totals[t] = a.counterexamples(t);
  j["counterexamples"] = totals;
  for (const auto& rec : a.records) {
    Json r;
    r["x"] = rec.x.text();
    r["mar"] = rec.mar;
    r["oar"] = rec.oar;
    r["distinct"] = rec.distinct;
    r["theorems"] = Json::array();
    for (const auto& t : rec.theorems) {
      r["theorems"].push_back(Json{{"theorem", t.theorem},
                                   {"iff", t.iff},
                                   {"hypotheses", t.hypotheses},
                                   {"conclusion", t.conclusion},
                                   {"sound", t.sound()},
                                   {"detail", t.detail}});
    }
    j["records"].push_back(std::move(r));
  }
  return j;
}

std::string emit_json(const Json& j) { return j.dump(2) + "\n"; }

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      text += cell;
      if (c + 1 < width.size()) text += std::string(width[c] - cell.size() + 2, ' ');
    }
    text.erase(text.find_last_not_of(' ') + 1);
    os << text << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : rows) line(row);
  return os.str();
}

std::string human_report(const ClassificationReport& r) {
  std::ostringstream os;
  os << "inference    " << inference_type_name(r.inference_type) << '\n'
     << "verdict      " << verdict_name(r.verdict) << '\n'
     << "target       " << r.target << '\n'
     << "observation  " << r.observation << '\n';
  if (r.x) os << "x            " << r.x->text() << '\n';
  if (r.alpha) os << "alpha        " << r.alpha->str() << '\n';
  os << "split        " << r.flags.split_status << " (omega " << r.flags.omega << ", policy " << r.flags.policy << ")\n";
  os << "flags        z_contains_y=" << yes_no(r.flags.z_contains_y)
     << " non_separated_grid=" << yes_no(r.flags.non_separated_grid) << " likelihood=" << r.flags.local_vs_uniform
     << " mar(" << r.flags.mar_variant << ")=" << (r.flags.mar ? yes_no(*r.flags.mar) : "n/a") << "\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& w : r.witnesses) {
    const std::string mark = w.equal ? "=" : "!=";
    if (is_table(w.left) && is_table(w.right)) {
      // One row per outcome; the first row carries the witness label.
      std::map<Value, std::pair<Value, Value>> cells;
      for (const auto& row : w.left.items()) cells[row[0]].first = row[1];
      for (const auto& row : w.right.items()) cells[row[0]].second = row[1];
      bool first = true;
      for (const auto& [key, lr] : cells) {
        rows.push_back({first ? w.kind : "", first ? w.at : "", first ? mark : "", key.text(), cell_text(lr.first),
                        cell_text(lr.second), ratio_text(lr.first, lr.second)});
        first = false;
      }
      continue;
    }
    rows.push_back({w.kind, w.at, mark, "", w.left.text(), w.right.text(), ""});
  }
  os << format_table({"witness", "at", "", "outcome", "model", "ignored model", "ratio"}, rows);
  if (!r.conditional_laws.empty()) {
    rows.clear();
    for (const auto& w : r.conditional_laws) {
      rows.push_back({w.at, w.equal ? "=" : "!=", w.left.text(), w.right.text()});
    }
    os << '\n' << format_table({"conditional law", "", "P(T[Y] | T)", "P(t(Y))"}, rows);
  }
  return os.str();
}

std::string human_report(const McReport& r) {
  std::ostringstream os;
  os << "grid point   " << r.grid_point << '\n'
     << "observation  " << r.observation << '\n'
     << "draws        " << r.draws << " (seed " << r.seed << ")\n"
     << "max |dev|    " << fixed_text(r.max_abs_deviation) << " (band " << fixed_text(r.three_sigma_bound) << ")\n"
     << "outside      " << r.outside() << " of " << r.cells.size() << " cells\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : r.cells) {
    rows.push_back({c.outcome.text(), c.exact.str(), std::to_string(c.count), fixed_text(c.frequency),
                    fixed_text(c.deviation), fixed_text(c.band), c.within ? "ok" : "OUTSIDE"});
  }
  os << format_table({"outcome", "exact", "count", "freq", "|dev|", "band", ""}, rows);
  return os.str();
}

std::string human_report(const RubinAudit& a) {
  std::ostringstream os;
  os << "model " << a.name << ": " << a.records.size() << " observation(s), " << a.counterexamples()
     << " counterexample(s)\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& rec : a.records) {
    std::vector<std::string> row{rec.x.text(), yes_no(rec.mar), yes_no(rec.oar), yes_no(rec.distinct)};
    for (const auto& t : rec.theorems) {
      row.push_back(std::string(t.hypotheses ? "H" : "-") + (t.conclusion ? "C" : "-") + (t.sound() ? "" : " FAIL"));
    }
    rows.push_back(std::move(row));
  }
  os << format_table({"x", "MAR", "OAR", "distinct", "6.1", "6.2", "6.3", "7.1", "7.2"}, rows);
  return os.str();
}

}  // namespace ilab
