#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ilab/catalog.hpp"
#include "ilab/model_build.hpp"
#include "ilab/model_document.hpp"
#include "ilab/report.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<fs::path> corpus(const std::string& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(ILAB_TEST_DATA_DIR) / dir)) {
    if (e.path().extension() == ".model") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("valid corpus round-trips through parse and emit") {
  const auto files = corpus("valid");
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    INFO(f.filename().string());
    const std::string text = slurp(f);
    const ModelDocument d = parse_model(text);
    CHECK(emit_model(d) == text);
    CHECK(parse_model(emit_model(d)) == d);
    const BuiltModel b = build_model(d);
    CHECK(b.name == f.stem().string());
    CHECK(b.model->population.size() == d.unit_labels().size());
  }
}

TEST_CASE("the built-in catalog is canonical") {
  CHECK(example_catalog().size() == 10);
  for (const auto& e : example_catalog()) {
    INFO(e.name);
    CHECK(emit_model(parse_model(e.text)) == e.text);
    CHECK(catalog_model(e.name).name == e.name);
  }
  CHECK(thrown_code([] { catalog_entry("nope"); }).second == ErrorCode::InvalidArgument);
}

TEST_CASE("invalid corpus yields located diagnostics") {
  const auto files = corpus("invalid");
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    INFO(f.filename().string());
    std::istringstream expected(slurp(fs::path(f).replace_extension(".expected")));
    std::string code;
    std::string at;
    expected >> code >> at;
    bool threw = false;
    try {
      build_model(parse_model_file(f.string()));
    } catch (const DocumentError& e) {
      threw = true;
      CHECK(std::string(error_code_name(e.code())) == code);
      CHECK(std::to_string(e.where().line) + ":" + std::to_string(e.where().column) == at);
      CHECK(std::string(e.what()).find("line " + std::to_string(e.where().line) + ", column ") != std::string::npos);
      CHECK_FALSE(e.rule().empty());
    }
    CHECK(threw);
  }
}

TEST_CASE("formatting freedom collapses to the canonical text") {
  const std::string loose = R"(# a comment line
[model]
name=loose   # trailing comment

[population]
size   =   2
[signal]
alphabet = 0,1
law = bernoulli
[grid]
theta = 1/3 ,  2/4
[design]
variant = mix( 1/2 : census , 1/2 : srs_wor( 1 ) )
[observation]
scheme = values_only
)";
  const ModelDocument d = parse_model(loose);
  CHECK(emit_model(d) == R"([model]
name = loose

[population]
size = 2

[signal]
alphabet = 0, 1
law = bernoulli

[grid]
theta = 1/3, 1/2

[design]
variant = mix(1/2: census, 1/2: srs_wor(1))

[observation]
scheme = values_only
)");
  CHECK(d.locations.of("design.variant").line == 13);
  REQUIRE(d.design.has_value());
  CHECK(d.design->text() == "mix(1/2: census, 1/2: srs_wor(1))");
}

TEST_CASE("documents without optional sections take the defaults") {
  const auto b = build_model(parse_model_file(std::string(ILAB_TEST_DATA_DIR) + "/valid/srs.model"));
  CHECK(b.split_v == "(signal, design_variable)");
  CHECK(b.split_v_bar == "selection");
  const auto d = parse_model("[population]\nsize = 1\n\n[signal]\nalphabet = 0, 1\nlaw = uniform\n\n[grid]\n"
                             "theta = t\n\n[design]\nvariant = census\n\n[observation]\nscheme = values_only\n");
  CHECK(d.phi_points().size() == 1);
  CHECK(d.phi_points().front().label == "-");
  CHECK(build_model(d).target == "mean_y1");
}

TEST_CASE("decimal hints") {
  CHECK(decimal_hint("0.25") == "1/4");
  CHECK(decimal_hint("1.5") == "3/2");
  CHECK(decimal_hint("2") == std::nullopt);
  CHECK(decimal_hint("abc") == std::nullopt);
}

TEST_CASE("value literals round-trip") {
  for (const char* text : {"3", "-1/2", "name", "\"two words\"", "()", "((1), (2, 3), x)"}) {
    INFO(text);
    CHECK(parse_value(text).text() == text);
  }
  CHECK(thrown_code([] { parse_value("(1, 2"); }).second == ErrorCode::SyntaxError);
}

TEST_CASE("classification reports round-trip through JSON") {
  const auto built = catalog_model("select_max");
  const Family f = family_of(built.model);
  const auto split = build_split(built, f);
  for (auto type : {InferenceType::LikelihoodBased, InferenceType::FrequentistEstimation, InferenceType::Bayesian}) {
    INFO(inference_type_name(type));
    const auto r = classify(f, split, built.scheme, std::nullopt, type, builtin_target("mean_y1"));
    const std::string text = emit_json(to_json(r));
    const auto back = classification_from_json(Json::parse(text));
    CHECK(back == r);
    CHECK(emit_json(to_json(back)) == text);
  }
  const auto with_x = classify(f, split, built.scheme, Value::tuple({Value(2)}), InferenceType::LikelihoodBased,
                               builtin_target("mean_y1"));
  CHECK(classification_from_json(to_json(with_x)) == with_x);
  const auto srs = catalog_model("srs");
  const Family fs_ = family_of(srs.model);
  const auto ign = classify(fs_, build_split(srs, fs_), srs.scheme, std::nullopt, InferenceType::LikelihoodBased,
                            builtin_target("mean_y1"));
  CHECK(to_json(ign).at("alpha") == "6/1");
  CHECK(classification_from_json(to_json(ign)) == ign);
}

TEST_CASE("simulation reports round-trip through JSON") {
  const auto built = catalog_model("stratified");
  const auto r = compare_exact_vs_mc(*built.model, 0, 0, built.scheme, 3000, 77);
  const Json j = to_json(r);
  CHECK(mc_report_from_json(j) == r);
  CHECK(j.at("outside") == r.outside());
  // Keys come out sorted, so the text is stable.
  const std::string text = emit_json(j);
  CHECK(text.find("\"cells\"") < text.find("\"draws\""));
  CHECK(text.back() == '\n');
}

TEST_CASE("malformed report JSON is rejected") {
  Json j = to_json(compare_exact_vs_mc(*catalog_model("srs").model, 0, 0, ObservationScheme::values_only(), 10, 1));
  j["cells"][0]["exact"] = "0.5";
  CHECK(thrown_code([&] { mc_report_from_json(j); }).second == ErrorCode::BadRational);
}

TEST_CASE("tables") {
  CHECK(format_table({"a", "bb"}, {{"xyz", "1"}, {"q", "22"}}) == "a    bb\n---  --\nxyz  1\nq    22\n");
}
