#include <numeric>

#include "doctest.h"

#include "ilab/catalog.hpp"
#include "ilab/kernels.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "support.hpp"

using namespace ilab;
using namespace ilab::testing;

namespace {

constexpr std::uint64_t kScale = std::uint64_t{1} << 53;

}  // namespace

TEST_CASE("generator matches the splitmix64 reference stream") {
  // Vigna's splitmix64 seeded with 0 starts 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4.
  CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  CHECK(uniform53(0, 0) == 0xE220A8397B1DCDAFULL >> 11);
  CHECK(uniform53(0, 1) == 0x6E789E6AA1B965F4ULL >> 11);
  CHECK(uniform53(7, 3) < kScale);
  CHECK(uniform53(7, 3) == uniform53(7, 3));
  CHECK(uniform53(7, 3) != uniform53(8, 3));
}

TEST_CASE("inverse-CDF thresholds") {
  CHECK(thresholds_from_weights({q(1, 2), q(1, 2)}) == std::vector<std::uint64_t>{kScale / 2, kScale});
  CHECK(thresholds_from_weights({q(1, 3), q(2, 3)}) == std::vector<std::uint64_t>{kScale / 3 + 1, kScale});
  CHECK(thresholds_from_weights({q(1)}) == std::vector<std::uint64_t>{kScale});
  const auto d = dist_new<int>({{5, q(1, 4)}, {1, q(1, 4)}, {3, q(1, 2)}});
  // Canonical order 1, 3, 5.
  CHECK(inverse_cdf_thresholds(d) == std::vector<std::uint64_t>{kScale / 4, kScale / 4 * 3, kScale});
}

TEST_CASE("counting kernels agree and conserve draws") {
  const auto thresholds = thresholds_from_weights({q(1, 6), q(1, 3), q(1, 2)});
  const auto serial = kernels::count_draws_serial(thresholds, 11, 5000);
  const auto omp = kernels::count_draws_omp(thresholds, 11, 5000);
  CHECK(serial == omp);
  CHECK(std::accumulate(serial.begin(), serial.end(), std::uint64_t{0}) == 5000);
  // Cell i receives exactly the indices whose uniform falls below threshold i.
  std::vector<std::uint64_t> manual(3, 0);
  for (std::uint64_t k = 0; k < 5000; ++k) {
    const auto u = uniform53(11, k);
    ++manual[u < thresholds[0] ? 0 : (u < thresholds[1] ? 1 : 2)];
  }
  CHECK(manual == serial);
}

TEST_CASE("sampled worlds come from the exact support") {
  const auto built = catalog_model("select_max");
  const auto joint = build_joint(*built.model, 0, 0);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto w = sample_world(*built.model, 0, 0, 99, k);
    CHECK(joint.weight(w) > q(0));
    CHECK(sample_world(*built.model, 0, 0, 99, k) == w);
  }
}

TEST_CASE("three-sigma band") {
  CHECK(three_sigma_band(q(0), 100) == doctest::Approx(0.01));
  CHECK(three_sigma_band(q(1, 2), 10000) == doctest::Approx(3 * 0.005 + 0.0001));
}

TEST_CASE("exact versus simulated observation laws") {
  const auto built = catalog_model("srs");
  const auto report = compare_exact_vs_mc(*built.model, 1, 0, built.scheme, 20000, 5);
  CHECK(report.draws == 20000);
  CHECK(report.seed == 5);
  CHECK(report.grid_point == built.model->grid_label(1, 0));
  CHECK(report.observation == "values_and_mapping");
  CHECK(report.cells.size() == 24);
  std::uint64_t total = 0;
  Rational exact;
  for (const auto& c : report.cells) {
    total += c.count;
    exact += c.exact;
    CHECK(c.deviation <= report.max_abs_deviation);
  }
  CHECK(total == 20000);
  CHECK(exact == q(1));
  CHECK(report.outside() <= 1);

  // Same seed, same report, with or without the OpenMP kernel.
  const bool before = kernels::parallel_enabled();
  kernels::set_parallel(!before);
  CHECK(compare_exact_vs_mc(*built.model, 1, 0, built.scheme, 20000, 5) == report);
  kernels::set_parallel(before);
  CHECK_FALSE(compare_exact_vs_mc(*built.model, 1, 0, built.scheme, 20000, 6) == report);

  CHECK(thrown_code([&] { compare_exact_vs_mc(*built.model, 1, 0, built.scheme, 0, 5); }).second ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("sampled-weights observations carry the realized design's pi") {
  const auto built = catalog_model("poisson");
  const auto report = compare_exact_vs_mc(*built.model, 0, 0, built.scheme, 5000, 1);
  const auto exact = observation_distribution(*built.model, 0, 0, built.scheme);
  REQUIRE(report.cells.size() == exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(report.cells[i].outcome == exact.atoms()[i].first);
    CHECK(report.cells[i].exact == exact.atoms()[i].second);
  }
}
