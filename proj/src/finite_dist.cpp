#include "ilab/finite_dist.hpp"

#include <atomic>
#include <cstdlib>

namespace ilab {

namespace {

std::size_t initial_cap() {
  if (const char* env = std::getenv("IGNORABILITY_LAB_MAX_SUPPORT")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

std::atomic<std::size_t>& cap_storage() {
  static std::atomic<std::size_t> cap{initial_cap()};
  return cap;
}

}  // namespace

std::size_t max_support() { return cap_storage().load(std::memory_order_relaxed); }

void set_max_support(std::size_t cap) { cap_storage().store(cap, std::memory_order_relaxed); }

namespace detail {

void check_support_size(std::size_t size) {
  if (size > max_support()) {
    throw Error(ErrorCode::ModelTooLarge,
                "support of " + std::to_string(size) + " atoms exceeds the cap of " + std::to_string(max_support()));
  }
}

}  // namespace detail

bool dist_eq(const FiniteDist<Value>& a, const FiniteDist<Value>& b) {
  if (!a.empty() && !b.empty()) {
    const int fa = kind_family(a.atoms().front().first);
    for (const auto& [o, _] : b.atoms()) {
      if (kind_family(o) != fa) {
        throw Error(ErrorCode::IncomparableOutcomes, "cannot compare distributions over " + a.atoms().front().first.text() +
                                                         " and " + o.text());
      }
    }
  }
  return a == b;
}

}  // namespace ilab
