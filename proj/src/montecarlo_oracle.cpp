#include "ilab/montecarlo_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ilab/error.hpp"
#include "ilab/kernels.hpp"

namespace ilab {

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t uniform53(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL) >> 11;
}

std::vector<std::uint64_t> thresholds_from_weights(const std::vector<Rational>& weights) {
  const mpz_class scale = mpz_class(1) << 53;
  std::vector<std::uint64_t> out;
  out.reserve(weights.size());
  mpq_class cumulative = 0;
  for (const auto& w : weights) {
    cumulative += w.raw();
    mpq_class scaled = cumulative * scale;
    mpz_class t;
    mpz_cdiv_q(t.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    if (t > scale) t = scale;
    out.push_back(static_cast<std::uint64_t>(t.get_ui()));
  }
  if (!out.empty()) out.back() = static_cast<std::uint64_t>(scale.get_ui());
  return out;
}

WorldState sample_world(const SurveyModel& m, std::size_t theta, std::size_t phi, std::uint64_t seed,
                        std::uint64_t index) {
  const auto joint = build_joint(m, theta, phi);
  const auto thresholds = inverse_cdf_thresholds(joint);
  const std::uint64_t u = uniform53(seed, index);
  const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), u);
  return joint.atoms().at(static_cast<std::size_t>(it - thresholds.begin())).first;
}

std::size_t McReport::outside() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const McCell& c) { return !c.within; }));
}

double three_sigma_band(const Rational& p, std::uint64_t draws) {
  const double q = p.to_double();
  const double n = static_cast<double>(draws);
  return 3.0 * std::sqrt(q * (1.0 - q) / n) + 1.0 / n;
}

McReport compare_exact_vs_mc(const SurveyModel& m, std::size_t theta, std::size_t phi, const ObservationScheme& s,
                             std::uint64_t draws, std::uint64_t seed) {
  if (draws == 0) throw Error(ErrorCode::InvalidArgument, "draws must be at least 1");
  const auto joint = build_joint(m, theta, phi);
  const auto counts = kernels::count_draws(inverse_cdf_thresholds(joint), seed, draws);

  // Aggregate world counts to observations.
  std::map<Value, std::vector<Rational>> pi_cache;
  std::map<Value, std::uint64_t> observed;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const WorldState& w = joint.atoms()[i].first;
    const std::vector<Rational>* pi = nullptr;
    if (s.tag == SchemeTag::ValuesAndSampledWeights) {
      auto it = pi_cache.find(w.z);
      if (it == pi_cache.end()) {
        it = pi_cache.emplace(w.z, inclusion_probabilities(m.designs.at(phi)(w.z), m.population.size())).first;
      }
      pi = &it->second;
    }
    observed[observe(w, s, m.population, pi)] += counts[i];
  }

  McReport report;
  report.grid_point = m.grid_label(theta, phi);
  report.observation = s.name();
  report.draws = draws;
  report.seed = seed;
  const auto exact = observation_distribution(m, theta, phi, s);
  for (const auto& [x, p] : exact.atoms()) {
    McCell cell;
    cell.outcome = x;
    cell.exact = p;
    cell.count = observed[x];
    cell.frequency = static_cast<double>(cell.count) / static_cast<double>(draws);
    cell.deviation = std::fabs(cell.frequency - p.to_double());
    cell.band = three_sigma_band(p, draws);
    cell.within = cell.deviation <= cell.band;
    if (cell.deviation >= report.max_abs_deviation) {
      report.max_abs_deviation = cell.deviation;
      report.three_sigma_bound = cell.band;
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace ilab
