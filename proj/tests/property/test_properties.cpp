#include <doctest.h>

#include "support/property_checks.hpp"

namespace {

constexpr std::uint64_t kTopologies = 50;

void report(const testing::Report& r, std::uint64_t seed) {
  INFO("topology seed " << seed);
  for (const auto& f : r.failures) FAIL_CHECK(f);
  CHECK(r.checks > 0);
}

}  // namespace

TEST_CASE("generated topologies stay within 60 nodes") {
  for (std::uint64_t s = 1; s <= kTopologies; ++s) CHECK(testing::propertyTopology(s).nodes.size() <= 60);
}

TEST_CASE("service properties over seeded topologies") {
  for (std::uint64_t s = 1; s <= kTopologies; ++s) report(testing::checkServices(testing::propertyTopology(s), s), s);
}

TEST_CASE("in-band control over seeded topologies") {
  for (std::uint64_t s = 1; s <= kTopologies; ++s) report(testing::checkControl(testing::propertyTopology(s)), s);
}

TEST_CASE("deployment plans over seeded topologies") {
  for (std::uint64_t s = 1; s <= kTopologies; ++s) report(testing::checkDeployment(testing::propertyTopology(s)), s);
}
