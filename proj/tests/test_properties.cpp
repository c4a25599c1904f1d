#include "doctest.h"

#include "posg/acceptance.hpp"

using namespace posg;

TEST_CASE("property suites hold on an independent seed") {
  const auto outcomes = run_property_suites(300, 1234567);
  CHECK(outcomes.size() == 6);
  for (const auto& o : outcomes) {
    INFO(o.name << " worst " << o.worst);
    CHECK(o.cases == 300);
    CHECK(o.failures == 0);
  }
}
