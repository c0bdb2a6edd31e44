#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <vector>

// Reference computations shared by the unit and acceptance tests. They are
// written from the model definitions only and share no code with the library
// routines they check.
namespace oracle {

inline double p1(std::span<const double> p, std::span<const double> h, double w, double v,
                 double noise) {
  double f = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    f += v * p[n] - w * std::log(1.0 + p[n] * h[n] / noise) / std::log(2.0);
  }
  return f;
}

// Exhaustive search over the budget grid {0, d, 2d, ..., p_max} split among
// the RBs. Each per-RB term is concave, so handing out grid units one at a
// time to the largest marginal decrease reaches the grid optimum.
inline std::vector<double> grid_waterfill(std::span<const double> h, double w, double v,
                                          double p_max, double noise, std::int64_t units) {
  const std::size_t m = h.size();
  const double d = p_max / static_cast<double>(units);
  std::vector<std::int64_t> count(m, 0);
  auto term = [&](std::size_t n, std::int64_t c) {
    const double p = d * static_cast<double>(c);
    return v * p - w * std::log(1.0 + p * h[n] / noise) / std::log(2.0);
  };
  using Item = std::pair<double, std::size_t>;  // (gain, rb)
  std::priority_queue<Item> heap;
  for (std::size_t n = 0; n < m; ++n) heap.emplace(term(n, 0) - term(n, 1), n);
  for (std::int64_t u = 0; u < units; ++u) {
    const auto [gain, n] = heap.top();
    if (gain <= 0) break;
    heap.pop();
    ++count[n];
    heap.emplace(term(n, count[n]) - term(n, count[n] + 1), n);
  }
  std::vector<double> p(m);
  for (std::size_t n = 0; n < m; ++n) p[n] = d * static_cast<double>(count[n]);
  return p;
}

inline double shape(double snr) { return std::sqrt(snr * (2.0 + snr)) / (1.0 + snr); }

// Finite-blocklength per-slot objective evaluated from its definition.
inline double p2(std::span<const double> p, std::span<const double> h, double w, double v,
                 double noise, double blocklength, double qinv) {
  double f = p1(p, h, w, v, noise);
  for (std::size_t n = 0; n < p.size(); ++n) {
    f += w / std::sqrt(blocklength) * qinv / std::log(2.0) * shape(p[n] * h[n] / noise);
  }
  return f;
}

struct Instance {
  std::vector<double> gains;
  double weight;
  double v;
  double p_max;
  double noise;
};

// Random single-pair problem with 1..max_rbs RBs, SNR at full power between
// about 0 and 60 dB, and V either 0 or around the marginal value at the
// budget.
inline Instance random_instance(std::mt19937_64& rng, int max_rbs) {
  std::uniform_int_distribution<int> rbs(1, max_rbs);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  in.p_max = 0.2;
  in.noise = std::pow(10.0, -15.0 + 3.0 * u(rng));
  const int m = rbs(rng);
  for (int n = 0; n < m; ++n) {
    in.gains.push_back(in.noise / in.p_max * std::pow(10.0, 6.0 * u(rng)));
  }
  in.weight = std::pow(10.0, -1.0 + 3.0 * u(rng));
  if (u(rng) < 0.3) {
    in.v = 0.0;
  } else {
    const double marginal = in.weight * in.gains[0] / ((in.noise + in.p_max * in.gains[0]) *
                                                        std::log(2.0));
    in.v = marginal * std::pow(10.0, -1.0 + 2.0 * u(rng));
  }
  return in;
}

}  // namespace oracle
