#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ddscope/zeta.hpp"
#include "oracles.hpp"

using ddscope::riemann_zeta;

TEST_SUITE("zeta") {

TEST_CASE("analytic anchor points") {
  CHECK(std::abs(riemann_zeta(2.0) - M_PI * M_PI / 6.0) < 1e-10);
  CHECK(std::abs(riemann_zeta(4.0) - std::pow(M_PI, 4) / 90.0) < 1e-10);
  CHECK(std::abs(riemann_zeta(6.0) - std::pow(M_PI, 6) / 945.0) < 1e-10);
}

TEST_CASE("value used by the coherence-time formula") {
  CHECK(std::abs(riemann_zeta(2.89) - oracle::kZeta289) < 1e-10);
  // monotonicity bracket
  CHECK(riemann_zeta(2.89) > riemann_zeta(3.0));
  CHECK(riemann_zeta(2.89) < riemann_zeta(2.5));
  CHECK(riemann_zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-12));
  CHECK(riemann_zeta(2.5) == doctest::Approx(1.3414872572509171).epsilon(1e-12));
}

TEST_CASE("cross-check against the standard-library evaluator") {
  for (double s : {1.05, 1.2, 1.5, 2.3, 2.89, 3.5, 5.0, 8.0, 20.0}) {
    CHECK(riemann_zeta(s) == doctest::Approx(std::riemann_zeta(s)).epsilon(1e-11));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(riemann_zeta(1.0), std::domain_error);
  CHECK_THROWS_AS(riemann_zeta(0.5), std::domain_error);
  CHECK_THROWS_AS(riemann_zeta(-2.0), std::domain_error);
}

}  // TEST_SUITE
