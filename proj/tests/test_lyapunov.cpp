#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "aoiv2v/channel.hpp"
#include "aoiv2v/lyapunov.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoiv2v;

namespace {

constexpr double kScale = 180e3 * 3e-3 / 4000.0;

// The weight written out term by term from the model.
double weight_d_formula(double vx, double vy, double vr, double vq, double q, double a,
                        double psi, double eps, bool ind) {
  const double i = ind ? 1.0 : 0.0;
  return kScale * (vr + a + q + vq * eps +
                   (-vq + vx + (2 * vy + 1) * (q + psi) + 2 * std::pow(q + psi, 3)) * i);
}

double weight_m_formula(double vx, double vy, double vr, double vq, double q, double at,
                        double ek, bool ind) {
  const double i = ind ? 1.0 : 0.0;
  return kScale *
         (vr + at + q + vq * ek + (-vq + vx + (2 * vy + 1) * at + 2 * std::pow(at, 3)) * i);
}

}  // namespace

TEST_CASE("weight collapses to the arrival term when everything is idle") {
  CHECK(weight_d({}, 0.0, 0.375, -1.375, 1e-3, false, kScale) == doctest::Approx(kScale * 0.375));
  CHECK(weight_m({}, 0.0, 0.0, 4.475e-4, false, kScale) == 0.0);
  CHECK(weight_m({}, 0.0, 1.0, 4.475e-4, true, kScale) == doctest::Approx(kScale * 4.0));
}

TEST_CASE("weight grows with the queue once past the slack") {
  VirtualQueues vq{0, 0, 0, 1e4};
  double prev = weight_d(vq, 2.0, 0.375, -1.375, 1e-3, true, kScale);
  for (double q = 2.5; q < 30.0; q += 0.5) {
    const double w = weight_d(vq, q, 0.375, -1.375, 1e-3, true, kScale);
    REQUIRE(w > prev);
    prev = w;
  }
}

TEST_CASE("weights against the written formula") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 500; ++i) {
    const VirtualQueues vq{u(rng), u(rng), u(rng), u(rng)};
    const double q = u(rng), a = u(rng) / 10, psi = -u(rng) / 5;
    const bool ind = i % 2 == 0;
    REQUIRE(weight_d(vq, q, a, psi, 1e-3, ind, kScale) ==
            doctest::Approx(weight_d_formula(vq.x, vq.y, vq.r, vq.q, q, a, psi, 1e-3, ind)));
    REQUIRE(weight_m(vq, q, a, 4e-4, ind, kScale) ==
            doctest::Approx(weight_m_formula(vq.x, vq.y, vq.r, vq.q, q, a, 4e-4, ind)));
  }
  const VirtualQueues base{1, 1, 1, 1}, tenx{1, 1, 10, 1};
  const double d1 = weight_m(tenx, 0, 1, 4e-4, false, kScale) - weight_m(base, 0, 1, 4e-4, false, kScale);
  CHECK(d1 == doctest::Approx(9 * kScale));
}

TEST_CASE("weight without the tail terms keeps only the frequency queue") {
  const VirtualQueues vq{3, 4, 5, 6};
  const double q = 4.0, psi = -1.375, a = 0.375;
  CHECK(weight_d(vq, q, a, psi, 1e-3, true, kScale, false) ==
        doctest::Approx(kScale * (5 + a + q + 6 * 1e-3 - 6)));
}

TEST_CASE("water-filling basics") {
  const std::vector<double> h{1e-9, 2e-10};
  for (double p : waterfill(0.0, h, 1.0, 0.2, 1e-13).powers) CHECK(p == 0.0);
  // One RB, slack budget: closed form w/(V ln2) - noise/h.
  const std::vector<double> one{1e-10};
  const double w = 0.5, v = 10.0, noise = 1e-13;
  const auto r = waterfill(w, one, v, 0.2, noise);
  CHECK(r.powers[0] == doctest::Approx(w / (v * std::numbers::ln2) - noise / 1e-10));
  CHECK(r.zeta == 0.0);
  // V = 0 spends the whole budget.
  const auto full = waterfill(w, h, 0.0, 0.2, noise);
  CHECK(std::accumulate(full.powers.begin(), full.powers.end(), 0.0) == doctest::Approx(0.2));
}

TEST_CASE("water-filling against exhaustive grid search and KKT") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    const auto in = oracle::random_instance(rng, 5);
    const auto r = waterfill(in.weight, in.gains, in.v, in.p_max, in.noise);
    const double total = std::accumulate(r.powers.begin(), r.powers.end(), 0.0);
    REQUIRE(total <= in.p_max * (1 + 1e-12));
    const auto g = oracle::grid_waterfill(in.gains, in.weight, in.v, in.p_max, in.noise, 1000000);
    const double fw = oracle::p1(r.powers, in.gains, in.weight, in.v, in.noise);
    const double fg = oracle::p1(g, in.gains, in.weight, in.v, in.noise);
    REQUIRE(std::abs(fw - fg) <= 1e-6 * std::max(std::abs(fg), in.weight));
    const double level = in.v + r.zeta;
    for (std::size_t n = 0; n < r.powers.size(); ++n) {
      const double marginal = in.weight * in.gains[n] /
                              ((in.noise + r.powers[n] * in.gains[n]) * std::numbers::ln2);
      if (r.powers[n] > 0) REQUIRE(std::abs(marginal - level) <= 1e-6 * level);
      else REQUIRE(marginal <= level * (1 + 1e-9));
    }
  }
}

TEST_CASE("priced water-filling with uniform prices agrees with the plain solver") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto in = oracle::random_instance(rng, 6);
    const std::vector<double> prices(in.gains.size(), in.v);
    const auto a = waterfill(in.weight, in.gains, in.v, in.p_max, in.noise);
    const auto b = waterfill_priced(in.weight, in.gains, prices, in.p_max, in.noise);
    for (std::size_t n = 0; n < a.powers.size(); ++n) {
      REQUIRE(b.powers[n] == doctest::Approx(a.powers[n]).epsilon(1e-8).scale(in.p_max));
    }
  }
  const std::vector<double> h{1e-9, 1e-9}, prices{0.0, INFINITY};
  const auto pinned = waterfill_priced(1.0, h, prices, 0.2, 1e-13);
  CHECK(pinned.powers[1] == 0.0);
  CHECK(pinned.powers[0] == doctest::Approx(0.2));
}

TEST_CASE("CCP objective never increases") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto in = oracle::random_instance(rng, 5);
    const auto L = static_cast<std::int64_t>(50 + 1000 * u(rng));
    const double eps = std::pow(10.0, -7.0 * u(rng) - 0.5);
    const auto r = ccp_solve(in.weight, in.gains, in.v, in.p_max, in.noise, L, eps);
    for (std::size_t j = 1; j < r.objective_history.size(); ++j) {
      const double prev = r.objective_history[j - 1];
      REQUIRE(r.objective_history[j] <= prev + 1e-9 * std::max(std::abs(prev), in.weight));
    }
    const double f = oracle::p2(r.powers, in.gains, in.weight, in.v, in.noise,
                                static_cast<double>(L), inverse_q(eps));
    CHECK(f == doctest::Approx(*std::min_element(r.objective_history.begin(),
                                                 r.objective_history.end())));
  }
}

TEST_CASE("CCP reduces to water-filling without a dispersion penalty") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const auto in = oracle::random_instance(rng, 5);
    const auto wf = waterfill(in.weight, in.gains, in.v, in.p_max, in.noise);
    const auto half = ccp_solve(in.weight, in.gains, in.v, in.p_max, in.noise, 540, 0.5);
    for (std::size_t n = 0; n < wf.powers.size(); ++n) {
      REQUIRE(std::abs(half.powers[n] - wf.powers[n]) <= 1e-6 * in.p_max);
    }
  }
}

TEST_CASE("virtual queues against a direct recursion") {
  const VirtualQueues zero;
  const auto same = update_vq_d(zero, 0.0, 0.375, 0.375, -1.375, 0.05, 0.0033, 1e-3);
  CHECK(same.x == 0.0);
  CHECK(same.y == 0.0);
  CHECK(same.r == 0.0);
  CHECK(same.q == 0.0);
  // An event with excess exactly H leaves vX where it was.
  const VirtualQueues start{2.0, 1.0, 0.0, 0.0};
  const double rate = 3.0, psi = -1.375, q = rate - psi + 0.05;
  CHECK(update_vq_d(start, q, rate, 0.375, psi, 0.05, 0.0033, 1e-3).x == doctest::Approx(2.0));
  CHECK(update_vq_m(start, 0.0, 1.0, 1.05, 0.05, 0.0033, 4e-4).x == doctest::Approx(2.0));

  Rng rng(13);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  VirtualQueues d, m;
  double x = 0, y = 0, r = 0, vq = 0, xm = 0, ym = 0, rm = 0, vqm = 0;
  for (int t = 0; t < 2000; ++t) {
    const double queue = u(rng) * 3, rate = u(rng), arrivals = std::floor(u(rng));
    d = update_vq_d(d, queue, rate, 0.375, psi, 0.05, 0.0033, 1e-3);
    const bool ev = queue > rate - psi;
    const double ex = queue - rate + psi;
    x = std::max(x + (ev ? ex - 0.05 : 0.0), 0.0);
    y = std::max(y + (ev ? ex * ex - 0.0033 : 0.0), 0.0);
    r = std::max(r - rate + 0.375, 0.0);
    vq = std::max(vq + rate * (ev ? 1.0 : 0.0) - rate * 1e-3, 0.0);
    REQUIRE(d.x == doctest::Approx(x));
    REQUIRE(d.y == doctest::Approx(y));
    REQUIRE(d.r == doctest::Approx(r));
    REQUIRE(d.q == doctest::Approx(vq));

    m = update_vq_m(m, queue, rate, arrivals, 0.05, 0.0033, 4e-4);
    const bool evm = arrivals > rate;
    const double exm = arrivals - rate;
    xm = std::max(xm + (evm ? exm - 0.05 : 0.0), 0.0);
    ym = std::max(ym + (evm ? exm * exm - 0.0033 : 0.0), 0.0);
    rm = std::max(rm - rate + arrivals, 0.0);
    vqm = std::max(vqm + rate * (evm ? 1.0 : 0.0) - rate * 4e-4, 0.0);
    REQUIRE(m.x == doctest::Approx(xm));
    REQUIRE(m.y == doctest::Approx(ym));
    REQUIRE(m.r == doctest::Approx(rm));
    REQUIRE(m.q == doctest::Approx(vqm));
  }
}

TEST_CASE("frozen excess queues when tail tracking is off") {
  const VirtualQueues start{2.0, 1.0, 0.0, 0.0};
  const auto next = update_vq_d(start, 20.0, 1.0, 0.375, -1.375, 0.05, 0.0033, 1e-3, false);
  CHECK(next.x == 2.0);
  CHECK(next.y == 1.0);
  CHECK(next.q > 0.0);
}
