#include <algorithm>
#include <cmath>
#include <vector>

#include "aoiv2v/traffic.hpp"
#include "doctest.h"

using namespace aoiv2v;

TEST_CASE("queue update arithmetic") {
  QueueState q{5.0, 0.0, 0.0};
  CHECK(update_queue(q, 2.0, 1.0).length == 4.0);
  q.length = 1.0;
  CHECK(update_queue(q, 5.0, 0.375).length == 0.375);
  CHECK(update_queue(q, 5.0, 0.375).cumulative_service == 1.0);
  CHECK_THROWS_AS(update_queue(q, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("queue trajectory matches the Lindley prefix-sum oracle") {
  Rng rng(21);
  std::uniform_real_distribution<double> svc(0.0, 2.0);
  std::poisson_distribution<int> arr(0.9);
  QueueState q;
  std::vector<double> s, a;
  for (int t = 0; t < 2000; ++t) {
    s.push_back(svc(rng));
    a.push_back(arr(rng));
    q = update_queue(q, s.back(), a.back());
    // Unrolled Lindley recursion: Q(t+1) = a_t + max(0, max_m sum_{i=m}^{t} (a_{i-1} - s_i)).
    double best = 0.0, acc = 0.0;
    for (int m = t; m >= 1; --m) {
      acc += a[m - 1] - s[m];
      best = std::max(best, acc);
    }
    REQUIRE(q.length == doctest::Approx(a[t] + best).epsilon(1e-9));
    REQUIRE(q.cumulative_arrivals - q.cumulative_service == doctest::Approx(q.length));
  }
}

TEST_CASE("periodic arrivals at A = 0.375") {
  const double tau = 3e-3;
  std::vector<double> all;
  for (int t = 0; t < 8; ++t) {
    const auto a = arrivals_deterministic(t, 0.375, tau);
    all.insert(all.end(), a.begin(), a.end());
  }
  REQUIRE(all.size() == 3);
  CHECK(all[0] == 0.0);
  CHECK(all[1] == doctest::Approx(tau / 0.375));
  CHECK(all[2] == doctest::Approx(2 * tau / 0.375));
  for (int t = 0; t < 5; ++t) {
    const auto a = arrivals_deterministic(t, 1.0, tau);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == doctest::Approx(t * tau));
    CHECK(arrivals_deterministic(t, 0.0, tau).empty());
  }
}

TEST_CASE("Poisson arrivals") {
  Rng rng = make_rng(2, Stream::kArrivals);
  CHECK(arrivals_poisson(rng, 0.0, 0, 3e-3).count == 0);
  double sum = 0.0;
  int zeros = 0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto a = arrivals_poisson(rng, 0.375, t, 3e-3);
    REQUIRE(static_cast<int>(a.instants.size()) == a.count);
    REQUIRE(std::is_sorted(a.instants.begin(), a.instants.end()));
    for (double x : a.instants) {
      REQUIRE(x >= t * 3e-3);
      REQUIRE(x < (t + 1) * 3e-3);
    }
    sum += a.count;
    zeros += a.count == 0;
  }
  CHECK(sum / n == doctest::Approx(0.375).epsilon(0.02));
  CHECK(static_cast<double>(zeros) / n == doctest::Approx(std::exp(-0.375)).epsilon(0.02));
}

TEST_CASE("block errors") {
  Rng rng(5);
  CHECK(fbl_service(3.0, 0.0, rng) == 3.0);
  CHECK(fbl_service(3.0, 1.0, rng) == 0.0);
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += fbl_service(1.0, 0.01, rng) == 0.0;
  CHECK(zeros / 1e5 == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("age grows linearly without departures") {
  AoiTracker tr;
  QueueState q;
  const double tau = 3e-3;
  double prev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double age = tr.advance(q, (t + 1) * tau);
    if (t > 0) CHECK(age - prev == doctest::Approx(tau));
    prev = age;
  }
}

TEST_CASE("one packet at 0 delivered in the first slot gives age tau") {
  AoiTracker tr;
  const double tau = 3e-3;
  QueueState q;
  q = update_queue(q, 0.0, 1.0);
  tr.record_arrivals(std::vector<double>{0.0});
  q = update_queue(q, 1.0, 0.0);
  CHECK(tr.advance(q, tau) == doctest::Approx(tau));
}

TEST_CASE("incremental age matches recomputation from the event log") {
  Rng rng(33);
  std::uniform_real_distribution<double> svc(0.0, 1.5);
  const double tau = 3e-3;
  AoiTracker tr(true);
  QueueState q;
  double min_gap = 1e9, last_arrival = -1.0, min_age = 1e9;
  for (int t = 0; t < 1000; ++t) {
    const auto a = arrivals_poisson(rng, 0.6, t, tau);
    q = update_queue(q, svc(rng), a.count);
    tr.record_arrivals(a.instants);
    for (double x : a.instants) {
      if (last_arrival >= 0) min_gap = std::min(min_gap, x - last_arrival);
      last_arrival = x;
    }
    const double now = (t + 1) * tau;
    const double age = tr.advance(q, now);
    REQUIRE(age == doctest::Approx(age_from_log(tr.log(), now)).epsilon(1e-12));
    if (tr.departed() > 0) min_age = std::min(min_age, age);
  }
  const auto& log = tr.log();
  for (std::size_t i = 1; i < log.size(); ++i) {
    REQUIRE(log[i].arrival >= log[i - 1].arrival);  // FCFS
    REQUIRE(log[i].departure >= log[i - 1].departure);
  }
  CHECK(min_age >= min_gap);
  CHECK(tr.departed() + static_cast<std::int64_t>(tr.pending()) ==
        static_cast<std::int64_t>(tr.all_arrivals().size()));
}
