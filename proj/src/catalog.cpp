#include "ilab/catalog.hpp"

#include "ilab/error.hpp"

namespace ilab {

const std::vector<CatalogEntry>& example_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"select_max",
       "Two units, uniform binary signal, the unit with the larger value is drawn; only the value is seen.",
       R"([model]
name = select_max

[population]
size = 2

[signal]
alphabet = 1, 2
law = uniform
z = signal

[grid]
theta = flat

[design]
variant = select_max

[observation]
scheme = values_only

[target]
name = mean_y1
)"},
      {"select_max_mapping",
       "The select-the-max design again, now revealing which unit was drawn.",
       R"([model]
name = select_max_mapping

[population]
size = 2

[signal]
alphabet = 1, 2
law = uniform
z = signal

[grid]
theta = flat

[design]
variant = select_max

[observation]
scheme = values_and_mapping

[target]
name = signal
)"},
      {"srs",
       "Simple random sampling of 2 from 3 with an iid Bernoulli signal; design free of (y, theta).",
       R"([model]
name = srs

[population]
size = 3

[signal]
alphabet = 0, 1
law = bernoulli

[grid]
theta = 1/3, 1/2, 2/3

[design]
variant = srs_wor(2)

[observation]
scheme = values_and_mapping

[target]
name = mean_y1
)"},
      {"srs_with_replacement",
       "Two draws with replacement from 3 units, values only: duplicates cannot be recognized.",
       R"([model]
name = srs_with_replacement

[population]
size = 3

[signal]
alphabet = 0, 1
law = bernoulli

[grid]
theta = 1/3, 2/3

[design]
variant = srs_wr(2)

[observation]
scheme = values_only

[target]
name = mean_y1
)"},
      {"bernoulli_mixture",
       "Observe unit 1, unit 2 (each with probability theta/2) or both; the selection law shares theta.",
       R"([model]
name = bernoulli_mixture

[population]
size = 2

[signal]
alphabet = 0, 1
law = bernoulli

[grid]
theta = 1/3, 1/2
phi = 1/3, 1/2
gamma = diagonal

[design]
variant.1/3 = mix(1/6: fixed(1), 1/6: fixed(2), 2/3: census)
variant.1/2 = mix(1/4: fixed(1), 1/4: fixed(2), 1/2: census)

[observation]
scheme = values_and_mapping

[target]
name = theta
)"},
      {"stratified",
       "Two strata of two units each, one unit drawn per stratum.",
       R"([model]
name = stratified

[population]
labels = a, b, c, d

[signal]
alphabet = 0, 1
law = bernoulli
z = fixed((1, 1, 2, 2))

[grid]
theta = 1/4, 3/4

[design]
variant = stratified(1: 1, 2: 1)

[observation]
scheme = values_and_mapping

[target]
name = mean_y1
)"},
      {"poisson",
       "Poisson sampling with unequal inclusion probabilities; values and their weights are seen.",
       R"([model]
name = poisson

[population]
size = 3

[signal]
alphabet = 0, 1
law = bernoulli

[grid]
theta = 1/3, 2/3

[design]
variant = poisson(1/2, 1/3, 1/4)

[observation]
scheme = values_and_sampled_weights

[target]
name = mean_y1
)"},
      {"nonresponse_mar",
       "Unit 1 always responds; unit 2 responds with a probability set by the observed y1.",
       R"([model]
name = nonresponse_mar

[population]
size = 2

[signal]
alphabet = 0, 1
law = bernoulli
z = signal

[grid]
theta = 1/3, 2/3

[design]
variant = cases((0, 0): mix(1/2: census, 1/2: fixed(1)), (0, 1): mix(1/2: census, 1/2: fixed(1)), (1, 0): mix(1/4: census, 3/4: fixed(1)), (1, 1): mix(1/4: census, 3/4: fixed(1)))

[observation]
scheme = values_and_indicator

[target]
name = theta

[split]
v = signal
v_bar = selection
)"},
      {"nonresponse_nmar",
       "Unit 2 responds only when its own value is 1: the missingness depends on the missing value.",
       R"([model]
name = nonresponse_nmar

[population]
size = 2

[signal]
alphabet = 0, 1
law = bernoulli
z = signal

[grid]
theta = 1/3, 2/3

[design]
variant = cases((0, 0): fixed(1), (0, 1): census, (1, 0): fixed(1), (1, 1): census)

[observation]
scheme = values_and_indicator

[target]
name = theta

[split]
v = signal
v_bar = selection
)"},
      {"table_signal",
       "Exchangeable but dependent signal given by an explicit joint table, SRS of one unit.",
       R"([model]
name = table_signal

[population]
size = 2

[signal]
alphabet = 0, 1
law = table
joint.low = (0, 0): 1/2, (0, 1): 1/6, (1, 0): 1/6, (1, 1): 1/6
joint.high = (0, 0): 1/6, (0, 1): 1/6, (1, 0): 1/6, (1, 1): 1/2

[grid]
theta = low, high

[design]
variant = srs_wor(1)

[observation]
scheme = values_only

[target]
name = theta
)"},
  };
  return catalog;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : example_catalog()) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::InvalidArgument, "no built-in example named '" + name + "'");
}

BuiltModel catalog_model(const std::string& name) { return build_model(parse_model(catalog_entry(name).text)); }

}  // namespace ilab
