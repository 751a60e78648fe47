#include "doctest.h"

#include "ilab/catalog.hpp"
#include "ilab/kernels.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "ilab/rubin_audit.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;

TEST_CASE("observed laws: serial and OpenMP agree on every catalog model") {
  for (const auto& entry : example_catalog()) {
    INFO(entry.name);
    const auto built = catalog_model(entry.name);
    const Family f = family_of(built.model);
    for (const char* target : {"mean_y1", "signal"}) {
      const auto tv = evaluate_target(builtin_target(target), f);
      const auto serial = kernels::observed_laws_serial(f, tv, built.scheme);
      CHECK(serial.size() == f.members.size());
      CHECK(kernels::observed_laws_omp(f, tv, built.scheme) == serial);
      for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(pushforward(serial[i], [](const kernels::ObsTarget& ot) { return ot.first; }) ==
              observation_distribution(f, f.members[i], built.scheme));
      }
    }
  }
}

TEST_CASE("draw counting: serial and OpenMP agree") {
  for (std::uint64_t seed : {0ULL, 1ULL, 20240601ULL}) {
    const auto thresholds = thresholds_from_weights({q(1, 7), q(2, 7), q(1, 7), q(3, 7)});
    CHECK(kernels::count_draws_serial(thresholds, seed, 12345) == kernels::count_draws_omp(thresholds, seed, 12345));
  }
  CHECK(kernels::count_draws_serial({std::uint64_t{1} << 53}, 3, 0).front() == 0);
}

TEST_CASE("Rubin sweep: serial and OpenMP agree") {
  auto jobs = rubin_sweep_family();
  jobs.resize(40);
  const auto serial = kernels::rubin_sweep_serial(jobs);
  const auto omp = kernels::rubin_sweep_omp(jobs);
  REQUIRE(serial.size() == omp.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].name == omp[i].name);
    CHECK(serial[i].records.size() == omp[i].records.size());
    CHECK(serial[i].counterexamples() == omp[i].counterexamples());
  }
}

TEST_CASE("dispatch switch") {
  CHECK(kernels::max_threads() >= 1);
  const bool before = kernels::parallel_enabled();
  kernels::set_parallel(false);
  CHECK_FALSE(kernels::parallel_enabled());
  kernels::set_parallel(before);
}
