#include <algorithm>
#include <cmath>
#include <vector>

#include "aoiv2v/evt.hpp"
#include "doctest.h"

using namespace aoiv2v;

namespace {

std::vector<double> draw(const GpdParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = gpd_sample(rng, p);
  return xs;
}

}  // namespace

TEST_CASE("GPD cdf values") {
  CHECK(gpd_cdf(0.0, {1.0, 0.3}) == 0.0);
  CHECK(gpd_cdf(2.0, {2.0, 0.0}) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(gpd_cdf(2.0, {2.0, 0.0}) == doctest::Approx(0.6321).epsilon(1e-4));
  CHECK(gpd_cdf(2.0, {1.0, -0.5}) == 1.0);
  CHECK(gpd_cdf(1.999, {1.0, -0.5}) < 1.0);
  CHECK(gpd_cdf(1.0, {1.0, 0.2}) + gpd_ccdf(1.0, {1.0, 0.2}) == doctest::Approx(1.0));
}

TEST_CASE("GPD cdf is monotone with the right limits") {
  for (double xi : {-0.4, -1e-9, 0.0, 0.25}) {
    double prev = 0.0;
    for (double x = 0.0; x < 50.0; x += 0.05) {
      const double f = gpd_cdf(x, {1.3, xi});
      REQUIRE(f >= prev);
      prev = f;
    }
    CHECK(gpd_cdf(1e9, {1.3, xi}) == doctest::Approx(1.0));
  }
}

TEST_CASE("xi -> 0 continuity") {
  for (double x = 0.0; x < 20.0; x += 0.1) {
    REQUIRE(std::abs(gpd_cdf(x, {1.0, 1e-8}) - (1.0 - std::exp(-x))) < 1e-6);
    REQUIRE(std::abs(gpd_cdf(x, {1.0, 2e-8}) - (1.0 - std::exp(-x))) < 1e-6);
  }
}

TEST_CASE("moments and caps") {
  const auto m = gpd_moments({2.0, 0.0});
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.variance == doctest::Approx(4.0));
  const auto caps = hb_caps(0.1031, -1.0625);
  CHECK(caps.h == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(caps.b == doctest::Approx(0.0033).epsilon(1e-3));
  CHECK(caps.b == doctest::Approx(2 * 0.1031 * 0.1031 / (2.0625 * 3.125)));
  CHECK(gpd_moments({0.1031, -1.0625}).second_moment() == doctest::Approx(caps.b));
  const auto one = hb_caps(1.0, 0.0);
  CHECK(one.h == 1.0);
  CHECK(one.b == 2.0);
  CHECK(hb_caps(1.0, 0.49).b < hb_caps(1.0, 0.4999).b);
}

TEST_CASE("sample moments match at n = 1e6") {
  const GpdParams p{0.8, 0.1};
  const auto xs = draw(p, 1000000, 17);
  double s1 = 0, s2 = 0;
  for (double x : xs) {
    s1 += x;
    s2 += x * x;
  }
  const auto m = gpd_moments(p);
  CHECK(s1 / 1e6 == doctest::Approx(m.mean).epsilon(0.01));
  CHECK(s2 / 1e6 == doctest::Approx(m.second_moment()).epsilon(0.01));
}

TEST_CASE("maximum-likelihood recovery") {
  SUBCASE("sigma 1, xi 0.1") {
    const auto f = fit_gpd(draw({1.0, 0.1}, 100000, 3));
    CHECK(f.params.sigma >= 0.97);
    CHECK(f.params.sigma <= 1.03);
    CHECK(f.params.xi >= 0.08);
    CHECK(f.params.xi <= 0.12);
  }
  SUBCASE("exponential") {
    const auto f = fit_gpd(draw({1.0, 0.0}, 100000, 4));
    CHECK(std::abs(f.params.xi) < 0.03);
  }
  SUBCASE("bounded support") {
    const auto f = fit_gpd(draw({0.5, -0.3}, 100000, 5));
    CHECK(f.params.sigma == doctest::Approx(0.5).epsilon(0.05));
    CHECK(std::abs(f.params.xi + 0.3) < 0.03);
  }
}

TEST_CASE("the fit beats nearby parameters") {
  const auto xs = draw({2.0, 0.2}, 5000, 8);
  const auto f = fit_gpd(xs);
  for (double ds : {-0.02, 0.02}) {
    for (double dx : {-0.01, 0.0, 0.01}) {
      const GpdParams q{f.params.sigma * (1 + ds), f.params.xi + dx};
      CHECK(gpd_log_likelihood(xs, q) <= f.log_likelihood + 1e-9);
    }
  }
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_gpd(draw({1.0, 0.0}, 10, 1)), std::invalid_argument);
  CHECK_THROWS_AS(fit_gpd(std::vector<double>(50, 1.0)), std::invalid_argument);
  auto xs = draw({1.0, 0.0}, 50, 1);
  xs[3] = -1.0;
  CHECK_THROWS_AS(fit_gpd(xs), std::invalid_argument);
}

TEST_CASE("KS distance") {
  const GpdParams p{1.0, 0.1};
  CHECK(ks_distance(draw(p, 10000, 6), p) < 0.02);
  const double median = p.sigma / p.xi * (std::pow(0.5, -p.xi) - 1.0);
  CHECK(ks_distance(std::vector<double>{median}, p) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_distance(std::vector<double>{}, p), std::invalid_argument);
}
