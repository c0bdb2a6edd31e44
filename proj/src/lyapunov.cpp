#include "aoiv2v/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "aoiv2v/aoi_mapping.hpp"
#include "aoiv2v/channel.hpp"

namespace aoiv2v {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
}  // namespace

double weight_d(const VirtualQueues& vq, double queue, double packets_per_slot, double psi,
                double epsilon_k, bool indicator, double rate_scale, bool tail_terms) {
  double w = vq.r + packets_per_slot + queue + vq.q * epsilon_k;
  if (indicator) {
    const double s = queue + psi;
    double inner = -vq.q;
    if (tail_terms) inner += vq.x + (2.0 * vq.y + 1.0) * s + 2.0 * s * s * s;
    w += inner;
  }
  return rate_scale * w;
}

double weight_m(const VirtualQueues& vq, double queue, double arrivals, double e_k,
                bool indicator, double rate_scale, bool tail_terms) {
  double w = vq.r + arrivals + queue + vq.q * e_k;
  if (indicator) {
    double inner = -vq.q;
    if (tail_terms) inner += vq.x + (2.0 * vq.y + 1.0) * arrivals + 2.0 * arrivals * arrivals * arrivals;
    w += inner;
  }
  return rate_scale * w;
}

PowerAllocation waterfill(double weight, std::span<const double> gains, double v, double p_max,
                          double noise_plus_i0) {
  const std::size_t m = gains.size();
  PowerAllocation out;
  out.powers.assign(m, 0.0);
  if (m == 0 || weight <= 0) return out;

  std::vector<double> floor_level(m);  // noise / h
  for (std::size_t n = 0; n < m; ++n) floor_level[n] = noise_plus_i0 / gains[n];

  if (v > 0) {
    const double level = weight / (v * kLn2);
    double total = 0.0;
    for (double a : floor_level) total += std::max(0.0, level - a);
    if (total <= p_max) {
      for (std::size_t n = 0; n < m; ++n) out.powers[n] = std::max(0.0, level - floor_level[n]);
      return out;
    }
  }
  // Budget-tight: find the water level mu with sum max(0, mu - a_n) = p_max.
  std::vector<double> sorted = floor_level;
  std::sort(sorted.begin(), sorted.end());
  double prefix = 0.0;
  double level = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    prefix += sorted[j];
    const double mu = (p_max + prefix) / static_cast<double>(j + 1);
    if (j + 1 == m || mu <= sorted[j + 1]) {
      level = mu;
      break;
    }
  }
  for (std::size_t n = 0; n < m; ++n) out.powers[n] = std::max(0.0, level - floor_level[n]);
  out.zeta = std::max(0.0, weight / (level * kLn2) - v);
  return out;
}

PowerAllocation waterfill_priced(double weight, std::span<const double> gains,
                                 std::span<const double> prices, double p_max,
                                 double noise_plus_i0) {
  const std::size_t m = gains.size();
  if (prices.size() != m) throw std::invalid_argument("waterfill_priced: size mismatch");
  PowerAllocation out;
  out.powers.assign(m, 0.0);
  if (m == 0 || weight <= 0) return out;

  auto power_at = [&](std::size_t n, double zeta) {
    const double c = prices[n] + zeta;
    if (!(c < kInf)) return 0.0;
    if (c <= 0) return kInf;
    return std::max(0.0, weight / (c * kLn2) - noise_plus_i0 / gains[n]);
  };
  auto total_at = [&](double zeta, double* slope) {
    double s = 0.0;
    double d = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      const double p = power_at(n, zeta);
      s += p;
      if (p > 0 && p < kInf) {
        const double c = prices[n] + zeta;
        d -= weight / (c * c * kLn2);
      }
    }
    if (slope) *slope = d;
    return s;
  };

  if (total_at(0.0, nullptr) <= p_max) {
    for (std::size_t n = 0; n < m; ++n) out.powers[n] = power_at(n, 0.0);
    return out;
  }
  // Above `hi` every RB is off.
  double hi = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    if (prices[n] < kInf) hi = std::max(hi, weight * gains[n] / (noise_plus_i0 * kLn2) - prices[n]);
  }
  double lo = 0.0;
  // The budget total is convex and decreasing in zeta: safeguarded Newton.
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double f = total_at(z, &slope) - p_max;
    if (std::abs(f) <= 1e-13 * p_max) break;
    if (f > 0) lo = z;
    else hi = z;
    if (hi - lo <= 1e-16 * hi) break;
    double next = slope < 0 ? z - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  if (total_at(z, nullptr) > p_max * (1.0 + 1e-12)) z = hi;
  for (std::size_t n = 0; n < m; ++n) out.powers[n] = power_at(n, z);
  out.zeta = z;
  return out;
}

double p1_objective(std::span<const double> powers, std::span<const double> gains,
                    double weight, double v, double noise_plus_i0) {
  double f = 0.0;
  for (std::size_t n = 0; n < powers.size(); ++n) {
    f += v * powers[n] - weight * std::log2(1.0 + powers[n] * gains[n] / noise_plus_i0);
  }
  return f;
}

namespace {

double shape_term(double snr) {
  return std::sqrt(snr * (2.0 + snr)) / (1.0 + snr);
}

}  // namespace

double p2_objective(std::span<const double> powers, std::span<const double> gains,
                    double weight, double v, double noise_plus_i0, std::int64_t blocklength,
                    double block_error) {
  const double coef = std::numbers::log2e * inverse_q(block_error) /
                      std::sqrt(static_cast<double>(blocklength));
  double f = p1_objective(powers, gains, weight, v, noise_plus_i0);
  for (std::size_t n = 0; n < powers.size(); ++n) {
    f += weight * coef * shape_term(powers[n] * gains[n] / noise_plus_i0);
  }
  return f;
}

CcpResult ccp_solve(double weight, std::span<const double> gains, double v, double p_max,
                    double noise_plus_i0, std::int64_t blocklength, double block_error,
                    const CcpOptions& opts, std::span<const double> start) {
  const std::size_t m = gains.size();
  CcpResult out;
  if (m == 0) {
    out.converged = true;
    return out;
  }
  if (!start.empty() && start.size() != m) throw std::invalid_argument("ccp_solve: bad start");
  std::vector<double> x = start.empty()
                              ? std::vector<double>(m, p_max / static_cast<double>(m))
                              : std::vector<double>(start.begin(), start.end());
  auto objective = [&](std::span<const double> p) {
    return p2_objective(p, gains, weight, v, noise_plus_i0, blocklength, block_error);
  };
  const double coef = weight * std::numbers::log2e * inverse_q(block_error) /
                      std::sqrt(static_cast<double>(blocklength));
  out.objective_history.push_back(objective(x));

  if (coef == 0.0 || weight <= 0) {
    out.powers = waterfill(weight, gains, v, p_max, noise_plus_i0).powers;
    out.objective_history.push_back(objective(out.powers));
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  std::vector<double> prices(m);
  std::vector<double> best = x;
  double best_f = out.objective_history.back();
  for (int j = 0; j < opts.max_iter; ++j) {
    // Gradient of G = -coef * shape(rho) with respect to P_n.
    for (std::size_t n = 0; n < m; ++n) {
      const double snr = x[n] * gains[n] / noise_plus_i0;
      if (snr <= 0) {
        prices[n] = kInf;
        continue;
      }
      const double dshape =
          1.0 / ((1.0 + snr) * (1.0 + snr) * std::sqrt(snr * (2.0 + snr)));
      const double grad = -coef * dshape * gains[n] / noise_plus_i0;
      prices[n] = v - grad;
    }
    x = waterfill_priced(weight, gains, prices, p_max, noise_plus_i0).powers;
    const double f = objective(x);
    const double prev = out.objective_history.back();
    out.objective_history.push_back(f);
    out.iterations = j + 1;
    if (f < best_f) {
      best_f = f;
      best = x;
    }
    if (prev - f < opts.tolerance * std::max(1.0, std::abs(prev))) {
      out.converged = true;
      break;
    }
  }
  out.powers = std::move(best);
  return out;
}

VirtualQueues update_vq_d(const VirtualQueues& vq, double queue, double rate,
                          double packets_per_slot, double psi, double h_cap, double b_cap,
                          double epsilon_k, bool track_excess) {
  const Violation e = violation_d(queue, rate, psi);
  const double ind = e.occurred ? 1.0 : 0.0;
  VirtualQueues out;
  out.x = track_excess ? std::max(vq.x + (e.excess - h_cap) * ind, 0.0) : vq.x;
  out.y = track_excess ? std::max(vq.y + (e.excess_sq - b_cap) * ind, 0.0) : vq.y;
  out.r = std::max(vq.r - rate + packets_per_slot, 0.0);
  out.q = std::max(vq.q + rate * ind - rate * epsilon_k, 0.0);
  return out;
}

VirtualQueues update_vq_m(const VirtualQueues& vq, double /*queue*/, double rate,
                          double arrivals, double h_cap, double b_cap, double e_k,
                          bool track_excess) {
  const Violation e = violation_m(arrivals, rate);
  const double ind = e.occurred ? 1.0 : 0.0;
  VirtualQueues out;
  out.x = track_excess ? std::max(vq.x + (e.excess - h_cap) * ind, 0.0) : vq.x;
  out.y = track_excess ? std::max(vq.y + (e.excess_sq - b_cap) * ind, 0.0) : vq.y;
  out.r = std::max(vq.r - rate + arrivals, 0.0);
  out.q = std::max(vq.q + rate * ind - rate * e_k, 0.0);
  return out;
}

}  // namespace aoiv2v
