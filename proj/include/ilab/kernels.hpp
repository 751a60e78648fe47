#pragma once

// Hot loops with a serial reference and an OpenMP version. The two always
// produce identical results; tests compare them and bench/ times them.

#include <cstdint>
#include <utility>
#include <vector>

#include "ilab/finite_dist.hpp"
#include "ilab/ignorance.hpp"
#include "ilab/sampling_model.hpp"

namespace ilab {

struct RubinJob;
struct RubinAudit;

namespace kernels {

using ObsTarget = std::pair<Value, Value>;

/// Per member, the joint law of (observation, target value). Parametric
/// targets contribute their constant per-member value.
std::vector<FiniteDist<ObsTarget>> observed_laws_serial(const Family& f, const TargetValues& tv,
                                                        const ObservationScheme& s);
std::vector<FiniteDist<ObsTarget>> observed_laws_omp(const Family& f, const TargetValues& tv,
                                                     const ObservationScheme& s);

/// Counter-based draws: counts[i] = number of draw indices in [0, draws)
/// whose uniform falls in cell i of the cumulative thresholds (scaled to 2^53).
std::vector<std::uint64_t> count_draws_serial(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                              std::uint64_t draws);
std::vector<std::uint64_t> count_draws_omp(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                           std::uint64_t draws);

std::vector<RubinAudit> rubin_sweep_serial(const std::vector<RubinJob>& jobs);
std::vector<RubinAudit> rubin_sweep_omp(const std::vector<RubinJob>& jobs);

/// Dispatchers used by the library: OpenMP when built with it and enabled.
bool parallel_enabled();
void set_parallel(bool on);
int max_threads();

std::vector<FiniteDist<ObsTarget>> observed_laws(const Family& f, const TargetValues& tv, const ObservationScheme& s);
std::vector<std::uint64_t> count_draws(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                       std::uint64_t draws);
std::vector<RubinAudit> rubin_sweep(const std::vector<RubinJob>& jobs);

}  // namespace kernels
}  // namespace ilab
