// ignorability-lab: command-line front end.
//
//   check        classify a model's nuisance process as ignorable or informative
//   enumerate    dump the joint law and the observation law at one grid point
//   inclusion    inclusion probabilities and the expected-size identities
//   audit-rubin  exact audit of Rubin's theorems on a missing-data model
//   mc-verify    seeded simulation against the exact observation law
//   examples     list or write the built-in example models
//
// Exit codes: 0 success, 1 verdict / audit / calibration mismatch, 2 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ilab/catalog.hpp"
#include "ilab/design_library.hpp"
#include "ilab/kernels.hpp"
#include "ilab/model_build.hpp"
#include "ilab/report.hpp"

namespace {

using namespace ilab;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kInputError = 2;

struct Common {
  bool json = false;
  bool serial = false;
};

struct CheckArgs {
  std::string file;
  std::vector<std::string> inference{"likelihood"};
  std::string policy = "dirac";
  std::string x;
  bool all_x = false;
  std::string mar_variant = "local";
  std::string omega = "product";
  std::string target;
  std::string estimator = "sample_mean";
  std::string v;
  std::string v_bar;
  std::string expect;
};

struct EnumerateArgs {
  std::string file;
  std::string theta;
  std::string phi;
};

struct McArgs {
  std::string file;
  std::uint64_t draws = 100000;
  std::uint64_t seed = 20240601;
  std::string theta;
  std::string phi;
  double max_outside = 0.01;
};

BuiltModel load(const std::string& path) {
  if (path.rfind("example:", 0) == 0) return catalog_model(path.substr(8));
  return build_model(parse_model_file(path));
}

InferenceType inference_of(const std::string& s) {
  if (s == "likelihood") return InferenceType::LikelihoodBased;
  if (s == "frequentist") return InferenceType::FrequentistEstimation;
  return InferenceType::Bayesian;
}

NuisancePolicy policy_of(const std::string& s) {
  if (s == "arbitrary") return NuisancePolicy::single();
  if (s == "marginal") return NuisancePolicy::marginal();
  return NuisancePolicy::dirac();
}

/// Observations of positive mass under any member of the family.
std::vector<Value> positive_xs(const Family& f, const ObservationScheme& s) {
  std::set<Value> xs;
  for (const auto& member : f.members) {
    const auto law = observation_distribution(f, member, s);
    for (const auto& [x, _] : law.atoms()) xs.insert(x);
  }
  return {xs.begin(), xs.end()};
}

int run_check(const CheckArgs& a, const Common& c) {
  BuiltModel b = load(a.file);
  if (!a.v.empty()) b.split_v = a.v;
  if (!a.v_bar.empty()) b.split_v_bar = a.v_bar;
  const Family f = family_of(b.model);
  ClassifyOptions options;
  options.policy = policy_of(a.policy);
  options.mar_variant = a.mar_variant == "uniform" ? MarVariant::Uniform : MarVariant::Local;
  options.omega = a.omega == "support" ? OmegaMode::SupportUnion : OmegaMode::Product;
  options.estimator = a.estimator;
  const ProcessSplit split = build_split(b, f, options.omega);
  const Target target = builtin_target(a.target.empty() ? b.target : a.target);

  std::vector<std::optional<Value>> xs;
  if (!a.x.empty()) xs.emplace_back(parse_value(a.x));
  else if (a.all_x) {
    for (auto& x : positive_xs(f, b.scheme)) xs.emplace_back(std::move(x));
  } else {
    xs.emplace_back(std::nullopt);
  }

  std::vector<ClassificationReport> reports;
  for (const auto& kind : a.inference) {
    for (const auto& x : xs) reports.push_back(classify(f, split, b.scheme, x, inference_of(kind), target, options));
  }

  if (c.json) {
    Json out;
    out["model"] = b.name;
    out["reports"] = Json::array();
    for (const auto& r : reports) out["reports"].push_back(to_json(r));
    std::cout << emit_json(out);
  } else {
    std::cout << "model " << b.name << "\n";
    for (const auto& r : reports) std::cout << '\n' << human_report(r);
  }

  if (a.expect.empty()) return kOk;
  for (const auto& r : reports) {
    if (verdict_name(r.verdict) != a.expect) {
      std::cerr << "expected " << a.expect << ", got " << verdict_name(r.verdict) << " ("
                << inference_type_name(r.inference_type) << (r.x ? ", x=" + r.x->text() : "") << ")\n";
      return kMismatch;
    }
  }
  return kOk;
}

std::vector<std::pair<std::size_t, std::size_t>> selected_points(const SurveyModel& m, const std::string& theta,
                                                                  const std::string& phi) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [t, p] : m.grid) {
    if (!theta.empty() && m.theta_grid[t].label != theta) continue;
    if (!phi.empty() && m.phi_grid[p].label != phi) continue;
    out.emplace_back(t, p);
  }
  if (out.empty()) {
    throw Error(ErrorCode::GridMiss, "no grid point matches theta='" + theta + "' phi='" + phi + "'");
  }
  return out;
}

template <class T, class Fn>
Json dist_json(const FiniteDist<T>& d, Fn&& key) {
  Json out = Json::array();
  for (const auto& [o, w] : d.atoms()) out.push_back(Json{{"outcome", key(o)}, {"p", w.str()}});
  return out;
}

int run_enumerate(const EnumerateArgs& a, const Common& c) {
  const BuiltModel b = load(a.file);
  const SurveyModel& m = *b.model;
  Json out;
  out["model"] = b.name;
  out["observation"] = b.scheme.name();
  out["points"] = Json::array();
  for (const auto& [t, p] : selected_points(m, a.theta, a.phi)) {
    const auto joint = build_joint(m, t, p);
    const auto obs = observation_distribution(m, t, p, b.scheme);
    const auto world_text = [&](const WorldState& w) { return world_value(w, m.population).text(); };
    const auto value_text = [](const Value& v) { return v.text(); };
    if (c.json) {
      out["points"].push_back(Json{{"grid_point", m.grid_label(t, p)},
                                   {"joint", dist_json(joint, world_text)},
                                   {"observation", dist_json(obs, value_text)}});
      continue;
    }
    std::cout << m.grid_label(t, p) << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [w, pr] : joint.atoms()) rows.push_back({world_text(w), pr.str()});
    std::cout << format_table({"world (y, z, r)", "P"}, rows) << '\n';
    rows.clear();
    for (const auto& [x, pr] : obs.atoms()) rows.push_back({x.text(), pr.str()});
    std::cout << format_table({"x (" + b.scheme.name() + ")", "P"}, rows) << '\n';
  }
  if (c.json) std::cout << emit_json(out);
  return kOk;
}

int run_inclusion(const EnumerateArgs& a, const Common& c) {
  const BuiltModel b = load(a.file);
  const SurveyModel& m = *b.model;
  const std::size_t n = m.population.size();
  Json out;
  out["model"] = b.name;
  out["points"] = Json::array();
  bool all_hold = true;
  for (const auto& [t, p] : selected_points(m, a.theta, a.phi)) {
    // Unconditional selection law: the kernel averaged over the design variable.
    const auto joint = build_joint(m, t, p);
    const Design design = pushforward(joint, [](const WorldState& w) { return w.r; });
    const auto pi = inclusion_probabilities(design, n);
    const auto upsilon = selection_expectations(design, n);
    Rational sum_pi;
    Rational sum_upsilon;
    for (const auto& v : pi) sum_pi += v;
    for (const auto& v : upsilon) sum_upsilon += v;
    const Rational distinct = expected_distinct_size(design);
    const Rational size = expected_size(design);
    all_hold = all_hold && sum_pi == distinct && sum_upsilon == size;
    if (c.json) {
      Json units = Json::array();
      for (std::size_t k = 0; k < n; ++k) {
        units.push_back(Json{{"unit", m.population.label(k).text()}, {"pi", pi[k].str()}, {"upsilon", upsilon[k].str()}});
      }
      out["points"].push_back(Json{{"grid_point", m.grid_label(t, p)},
                                   {"units", units},
                                   {"sum_pi", sum_pi.str()},
                                   {"expected_distinct_size", distinct.str()},
                                   {"sum_upsilon", sum_upsilon.str()},
                                   {"expected_size", size.str()},
                                   {"without_replacement", without_replacement(design)}});
      continue;
    }
    std::cout << m.grid_label(t, p) << (without_replacement(design) ? "  (without replacement)" : "") << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < n; ++k) rows.push_back({m.population.label(k).text(), pi[k].str(), upsilon[k].str()});
    std::cout << format_table({"unit", "pi", "upsilon"}, rows);
    std::cout << "sum pi      = " << sum_pi.str() << "   E|distinct| = " << distinct.str()
              << (sum_pi == distinct ? "   ok" : "   MISMATCH") << '\n'
              << "sum upsilon = " << sum_upsilon.str() << "   E n         = " << size.str()
              << (sum_upsilon == size ? "   ok" : "   MISMATCH") << "\n\n";
  }
  if (c.json) {
    out["identities_hold"] = all_hold;
    std::cout << emit_json(out);
  }
  return all_hold ? kOk : kMismatch;
}

int run_audit(const std::string& file, const Common& c) {
  const BuiltModel b = load(file);
  const RubinAudit audit = audit_all_x(RubinJob{b.name, b.model, b.scheme});
  if (c.json) std::cout << emit_json(to_json(audit));
  else std::cout << human_report(audit);
  return audit.counterexamples() == 0 ? kOk : kMismatch;
}

int run_mc(const McArgs& a, const Common& c) {
  const BuiltModel b = load(a.file);
  const SurveyModel& m = *b.model;
  std::vector<McReport> reports;
  std::size_t cells = 0;
  std::size_t outside = 0;
  for (const auto& [t, p] : selected_points(m, a.theta, a.phi)) {
    reports.push_back(compare_exact_vs_mc(m, t, p, b.scheme, a.draws, a.seed));
    cells += reports.back().cells.size();
    outside += reports.back().outside();
  }
  const double fraction = cells == 0 ? 0.0 : static_cast<double>(outside) / static_cast<double>(cells);
  if (c.json) {
    Json out;
    out["model"] = b.name;
    out["cells"] = cells;
    out["outside"] = outside;
    out["reports"] = Json::array();
    for (const auto& r : reports) out["reports"].push_back(to_json(r));
    std::cout << emit_json(out);
  } else {
    std::cout << "model " << b.name << ": " << outside << " of " << cells << " cells outside their 3-sigma band\n";
    for (const auto& r : reports) std::cout << '\n' << human_report(r);
  }
  return fraction <= a.max_outside ? kOk : kMismatch;
}

int run_examples(const std::string& write_dir, const std::string& name, bool list) {
  if (list) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : example_catalog()) rows.push_back({e.name, e.summary});
    std::cout << format_table({"name", "summary"}, rows);
    return kOk;
  }
  if (!write_dir.empty()) {
    std::filesystem::create_directories(write_dir);
    for (const auto& e : example_catalog()) {
      const auto path = std::filesystem::path(write_dir) / (e.name + ".model");
      std::ofstream(path) << e.text;
      std::cout << path.string() << '\n';
    }
    return kOk;
  }
  bool first = true;
  for (const auto& e : example_catalog()) {
    if (!name.empty() && e.name != name) continue;
    if (!first) std::cout << '\n';
    first = false;
    std::cout << "# " << e.summary << '\n' << e.text;
  }
  if (first) throw Error(ErrorCode::InvalidArgument, "no built-in example named '" + name + "'");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact ignorability checks for finite survey-sampling models"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json, "Print canonical JSON instead of tables");
  app.add_flag("--serial", common.serial, "Use the serial reference kernels");

  const auto model_help = "Model file, or example:<name> for a built-in example";

  CheckArgs check;
  auto* cmd_check = app.add_subcommand("check", "Classify the nuisance process as ignorable or informative");
  cmd_check->add_option("model", check.file, model_help)->required();
  cmd_check->add_option("--inference", check.inference, "likelihood, frequentist, bayes (repeatable)")
      ->check(CLI::IsMember({"likelihood", "frequentist", "bayes"}));
  cmd_check->add_option("--policy", check.policy, "Nuisance policy")->check(CLI::IsMember({"dirac", "arbitrary", "marginal"}));
  auto* opt_x = cmd_check->add_option("--x", check.x, "Observation literal, e.g. \"((1), (1))\"");
  cmd_check->add_flag("--all-x", check.all_x, "One local report per observation of positive mass")->excludes(opt_x);
  cmd_check->add_option("--mar-variant", check.mar_variant, "MAR flag variant")->check(CLI::IsMember({"local", "uniform"}));
  cmd_check->add_option("--omega", check.omega, "World space")->check(CLI::IsMember({"product", "support"}));
  cmd_check->add_option("--target", check.target, "Override the model's target")
      ->check(CLI::IsMember({"theta", "mean_y1", "population_mean", "signal", "model_index"}));
  cmd_check->add_option("--estimator", check.estimator, "Frequentist estimator")
      ->check(CLI::IsMember({"sample_mean", "first_value", "sample_values", "observation"}));
  cmd_check->add_option("--v", check.v, "Override the retained variable V");
  cmd_check->add_option("--v-bar", check.v_bar, "Override the ignored variable Vbar");
  cmd_check->add_option("--expect", check.expect, "Exit 1 unless every verdict matches")
      ->check(CLI::IsMember({"ignorable", "informative"}));

  EnumerateArgs enumerate;
  auto* cmd_enum = app.add_subcommand("enumerate", "Joint and observation laws at grid points");
  cmd_enum->add_option("model", enumerate.file, model_help)->required();
  cmd_enum->add_option("--theta", enumerate.theta, "Theta label (default: every point)");
  cmd_enum->add_option("--phi", enumerate.phi, "Phi label");

  EnumerateArgs inclusion;
  auto* cmd_incl = app.add_subcommand("inclusion", "Inclusion probabilities and size identities");
  cmd_incl->add_option("model", inclusion.file, model_help)->required();
  cmd_incl->add_option("--theta", inclusion.theta, "Theta label");
  cmd_incl->add_option("--phi", inclusion.phi, "Phi label");

  std::string audit_file;
  auto* cmd_audit = app.add_subcommand("audit-rubin", "Audit Rubin's theorems at every observation");
  cmd_audit->add_option("model", audit_file, model_help)->required();

  McArgs mc;
  auto* cmd_mc = app.add_subcommand("mc-verify", "Seeded simulation against the exact observation law");
  cmd_mc->add_option("model", mc.file, model_help)->required();
  cmd_mc->add_option("--draws", mc.draws, "Number of draws")->check(CLI::PositiveNumber);
  cmd_mc->add_option("--seed", mc.seed, "Stream seed");
  cmd_mc->add_option("--theta", mc.theta, "Theta label (default: every point)");
  cmd_mc->add_option("--phi", mc.phi, "Phi label");
  cmd_mc->add_option("--max-outside", mc.max_outside, "Largest tolerated fraction of cells outside the band");

  std::string write_dir;
  std::string example_name;
  bool list = false;
  auto* cmd_examples = app.add_subcommand("examples", "Print the built-in example models");
  cmd_examples->add_option("name", example_name, "Only this example");
  cmd_examples->add_option("--write", write_dir, "Write every example to DIR/<name>.model");
  cmd_examples->add_flag("--list", list, "One line per example");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (common.serial) kernels::set_parallel(false);
    if (*cmd_check) return run_check(check, common);
    if (*cmd_enum) return run_enumerate(enumerate, common);
    if (*cmd_incl) return run_inclusion(inclusion, common);
    if (*cmd_audit) return run_audit(audit_file, common);
    if (*cmd_mc) return run_mc(mc, common);
    if (*cmd_examples) return run_examples(write_dir, example_name, list);
  } catch (const ilab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
