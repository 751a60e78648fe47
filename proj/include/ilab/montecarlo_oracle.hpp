#pragma once

// Seeded simulation cross-check of the exact engine.
//
// Generator: draw k of stream `seed` is splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
// (wrapping 64-bit arithmetic; splitmix64 is Vigna's finalizer), keeping the
// top 53 bits as u in [0, 2^53). The draw selects the first support atom i,
// in canonical order, with u < ceil(c_i * 2^53), c_i being the cumulative
// exact probability through atom i.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t uniform53(std::uint64_t seed, std::uint64_t index);

/// ceil(c_i * 2^53) for the cumulative weights of d; the last entry is 2^53.
template <class T>
std::vector<std::uint64_t> inverse_cdf_thresholds(const FiniteDist<T>& d);
std::vector<std::uint64_t> thresholds_from_weights(const std::vector<Rational>& weights);

WorldState sample_world(const SurveyModel& m, std::size_t theta, std::size_t phi, std::uint64_t seed,
                        std::uint64_t index);

struct McCell {
  Value outcome;
  Rational exact;
  std::uint64_t count = 0;
  double frequency = 0;
  double deviation = 0;
  double band = 0;
  bool within = true;

  friend bool operator==(const McCell&, const McCell&) = default;
};

struct McReport {
  std::string grid_point;
  std::string observation;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
  double max_abs_deviation = 0;
  double three_sigma_bound = 0;  // band of the cell with the largest deviation
  std::vector<McCell> cells;

  std::size_t outside() const;
  friend bool operator==(const McReport&, const McReport&) = default;
};

/// Band for a cell of exact probability p: 3 sqrt(p (1 - p) / draws) plus one
/// count of lattice slack, so a single draw is always within its band.
double three_sigma_band(const Rational& p, std::uint64_t draws);

McReport compare_exact_vs_mc(const SurveyModel& m, std::size_t theta, std::size_t phi, const ObservationScheme& s,
                             std::uint64_t draws, std::uint64_t seed);

template <class T>
std::vector<std::uint64_t> inverse_cdf_thresholds(const FiniteDist<T>& d) {
  std::vector<Rational> weights;
  weights.reserve(d.size());
  for (const auto& [_, w] : d.atoms()) weights.push_back(w);
  return thresholds_from_weights(weights);
}

}  // namespace ilab
