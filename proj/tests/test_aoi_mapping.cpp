#include <cmath>

#include "aoiv2v/aoi_mapping.hpp"
#include "aoiv2v/config.hpp"
#include "doctest.h"

using namespace aoiv2v;

TEST_CASE("periodic-arrival event") {
  CHECK_FALSE(violation_d(0.0, 10.0, -1.375).occurred);
  const Violation v = violation_d(12.0, 10.0, -1.375);
  CHECK(v.occurred);
  CHECK(v.excess == doctest::Approx(12.0 - 11.375));
  CHECK(v.excess == doctest::Approx(0.625));
  CHECK(v.excess_sq == doctest::Approx(0.625 * 0.625));
  CHECK_FALSE(violation_d(11.375, 10.0, -1.375).occurred);
}

TEST_CASE("Poisson-arrival event") {
  CHECK_FALSE(violation_m(0.0, 1.0).occurred);
  const Violation v = violation_m(3.0, 1.2);
  CHECK(v.occurred);
  CHECK(v.excess == doctest::Approx(1.8));
  CHECK_FALSE(violation_m(2.0, 2.0).occurred);
}

TEST_CASE("age-tail mappings") {
  CHECK(aoi_bound_d(0.0) == 0.0);
  CHECK(aoi_bound_d(0.01) == 0.01);
  const double idle = std::exp(-0.375 * 60e-3 / 3e-3);
  CHECK(aoi_prob_m(0.0, 0.375, 60e-3, 3e-3) == doctest::Approx(idle));
  CHECK(idle == doctest::Approx(5.531e-4).epsilon(1e-3));
  CHECK(aoi_prob_m(1.0, 0.375, 60e-3, 3e-3) == doctest::Approx(1.0));
  const double ek = compute_e_k(1e-3, 0.375, 60e-3, 3e-3);
  CHECK(aoi_prob_m(ek, 0.375, 60e-3, 3e-3) == doctest::Approx(1e-3).epsilon(1e-12));
}
