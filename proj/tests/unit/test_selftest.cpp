#include "common.hpp"
#include "czx/errors.hpp"
#include "czx/selftest.hpp"

using namespace czx;

TEST_CASE("built-in self-checks pass for every module") {
  for (const auto& m : selftest_modules()) {
    const SelftestReport r = run_selftest(m);
    CHECK(!r.cases.empty());
    for (const auto& c : r.cases) {
      INFO(m, ": ", c.name, " ", c.detail);
      CHECK(c.passed);
    }
  }
  CHECK_THROWS_AS(run_selftest("nonexistent"), ParameterError);
}
