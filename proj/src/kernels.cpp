#include "ilab/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>

#include "ilab/montecarlo_oracle.hpp"
#include "ilab/rubin_audit.hpp"

#ifdef ILAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace ilab::kernels {

namespace {

std::atomic<bool> g_parallel{true};

FiniteDist<ObsTarget> member_law(const Family& f, std::size_t i, const TargetValues& tv, const ObservationScheme& s) {
  const Member& member = f.members[i];
  const SurveyModel& model = *f.model;
  std::map<Value, std::vector<Rational>> pi_cache;
  return pushforward(member.joint, [&](const WorldState& w) {
    const std::vector<Rational>* pi = nullptr;
    if (s.tag == SchemeTag::ValuesAndSampledWeights) {
      auto it = pi_cache.find(w.z);
      if (it == pi_cache.end()) {
        it = pi_cache.emplace(w.z, inclusion_probabilities(model.designs.at(member.phi)(w.z), model.population.size()))
                 .first;
      }
      pi = &it->second;
    }
    Value x = observe(w, s, model.population, pi);
    Value tau = tv.per_member.empty() ? tv.target.predictand(w) : tv.per_member.at(i);
    return ObsTarget{std::move(x), std::move(tau)};
  });
}

void count_range(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed, std::uint64_t begin,
                 std::uint64_t end, std::vector<std::uint64_t>& counts) {
  for (std::uint64_t k = begin; k < end; ++k) {
    const std::uint64_t u = uniform53(seed, k);
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), u);
    ++counts[static_cast<std::size_t>(it - thresholds.begin())];
  }
}

/// Runs body(i) for i in [0, n) on the OpenMP team; the first exception
/// thrown by any iteration is rethrown after the region.
template <class Body>
void omp_for_each(std::size_t n, Body&& body) {
  std::exception_ptr failure;
#ifdef ILAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ilab_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
#else
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
#endif
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<FiniteDist<ObsTarget>> observed_laws_serial(const Family& f, const TargetValues& tv,
                                                        const ObservationScheme& s) {
  std::vector<FiniteDist<ObsTarget>> out;
  out.reserve(f.members.size());
  for (std::size_t i = 0; i < f.members.size(); ++i) out.push_back(member_law(f, i, tv, s));
  return out;
}

std::vector<FiniteDist<ObsTarget>> observed_laws_omp(const Family& f, const TargetValues& tv,
                                                     const ObservationScheme& s) {
  std::vector<FiniteDist<ObsTarget>> out(f.members.size());
  omp_for_each(f.members.size(), [&](std::size_t i) { out[i] = member_law(f, i, tv, s); });
  return out;
}

std::vector<std::uint64_t> count_draws_serial(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                              std::uint64_t draws) {
  std::vector<std::uint64_t> counts(thresholds.size(), 0);
  count_range(thresholds, seed, 0, draws, counts);
  return counts;
}

std::vector<std::uint64_t> count_draws_omp(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                           std::uint64_t draws) {
  std::vector<std::uint64_t> counts(thresholds.size(), 0);
#ifdef ILAB_HAVE_OPENMP
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(thresholds.size(), 0);
    const auto threads = static_cast<std::uint64_t>(omp_get_num_threads());
    const auto id = static_cast<std::uint64_t>(omp_get_thread_num());
    const std::uint64_t chunk = (draws + threads - 1) / threads;
    const std::uint64_t begin = std::min(draws, id * chunk);
    const std::uint64_t end = std::min(draws, begin + chunk);
    count_range(thresholds, seed, begin, end, local);
#pragma omp critical(ilab_count_merge)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
  }
#else
  count_range(thresholds, seed, 0, draws, counts);
#endif
  return counts;
}

std::vector<RubinAudit> rubin_sweep_serial(const std::vector<RubinJob>& jobs) {
  std::vector<RubinAudit> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(audit_all_x(job));
  return out;
}

std::vector<RubinAudit> rubin_sweep_omp(const std::vector<RubinJob>& jobs) {
  std::vector<RubinAudit> out(jobs.size());
  omp_for_each(jobs.size(), [&](std::size_t i) { out[i] = audit_all_x(jobs[i]); });
  return out;
}

bool parallel_enabled() {
#ifdef ILAB_HAVE_OPENMP
  return g_parallel.load();
#else
  return false;
#endif
}

void set_parallel(bool on) { g_parallel.store(on); }

int max_threads() {
#ifdef ILAB_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<FiniteDist<ObsTarget>> observed_laws(const Family& f, const TargetValues& tv, const ObservationScheme& s) {
  return parallel_enabled() && f.members.size() > 1 ? observed_laws_omp(f, tv, s) : observed_laws_serial(f, tv, s);
}

std::vector<std::uint64_t> count_draws(const std::vector<std::uint64_t>& thresholds, std::uint64_t seed,
                                       std::uint64_t draws) {
  return parallel_enabled() ? count_draws_omp(thresholds, seed, draws) : count_draws_serial(thresholds, seed, draws);
}

std::vector<RubinAudit> rubin_sweep(const std::vector<RubinJob>& jobs) {
  return parallel_enabled() ? rubin_sweep_omp(jobs) : rubin_sweep_serial(jobs);
}

}  // namespace ilab::kernels
