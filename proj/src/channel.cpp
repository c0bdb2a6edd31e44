#include "aoiv2v/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aoiv2v {

namespace {

constexpr double kMinDistance = 1.0;

double clamp_distance(double d) { return std::max(d, kMinDistance); }

}  // namespace

LinkRegime classify_link(const VehicleState& tx, const VehicleState& rx, const RoadGrid& grid,
                         const PathLossParams& p) {
  const bool htx = is_horizontal(tx.heading);
  const bool hrx = is_horizontal(rx.heading);
  if (htx == hrx) return tx.road == rx.road ? LinkRegime::kLos : LinkRegime::kNlos;
  // Crossing of the vertical road with the horizontal road.
  const VehicleState& h = htx ? tx : rx;
  const VehicleState& v = htx ? rx : tx;
  const Vec2 crossing{grid.road_center(v.road), grid.road_center(h.road)};
  const bool near = euclidean_distance(grid, tx.position, crossing) <= p.intersection_m ||
                    euclidean_distance(grid, rx.position, crossing) <= p.intersection_m;
  return near ? LinkRegime::kWlos : LinkRegime::kNlos;
}

double path_loss(const VehicleState& tx, const VehicleState& rx, const RoadGrid& grid,
                 const PathLossParams& p) {
  const Vec2 d = grid.delta(tx.position, rx.position);
  switch (classify_link(tx, rx, grid, p)) {
    case LinkRegime::kLos:
      return p.l0 * std::pow(clamp_distance(std::hypot(d.x, d.y)), -p.alpha);
    case LinkRegime::kWlos:
      return p.l0 * std::pow(clamp_distance(std::abs(d.x) + std::abs(d.y)), -p.alpha);
    case LinkRegime::kNlos:
      return p.l0_prime *
             std::pow(clamp_distance(std::abs(d.x)) * clamp_distance(std::abs(d.y)), -p.alpha);
  }
  return 0.0;
}

double sample_fading(Rng& rng) {
  std::exponential_distribution<double> dist(1.0);
  return dist(rng);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double inverse_q(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("inverse_q: eps must lie in (0, 1)");
  // Acklam's rational approximation of the standard normal quantile at 1 - eps.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  // Quantile of the lower tail: x such that Phi(x) = eps, then Q^{-1}(eps) = -x.
  const double pr = eps;
  double x;
  if (pr < p_low) {
    const double q = std::sqrt(-2.0 * std::log(pr));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (pr <= 1.0 - p_low) {
    const double q = pr - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - pr));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement on Phi(x) = eps.
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - pr;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return -x;
}

double dispersion(double snr) {
  const double l2e = std::numbers::log2e;
  return snr * (2.0 + snr) / ((1.0 + snr) * (1.0 + snr)) * l2e * l2e;
}

double fbl_spectral_efficiency(double snr, std::int64_t blocklength, double qinv) {
  const double L = static_cast<double>(blocklength);
  return std::log2(1.0 + snr) - std::sqrt(dispersion(snr) / L) * qinv +
         std::log2(L) / (2.0 * L);
}

namespace {

template <typename InterferenceAt>
RateResult shannon_impl(std::span<const double> powers, std::span<const double> gains,
                        const RateParams& rp, InterferenceAt interference) {
  if (powers.size() != gains.size()) throw std::invalid_argument("shannon_rate: size mismatch");
  RateResult out;
  out.per_rb_bits.resize(powers.size());
  double total = 0.0;
  for (std::size_t n = 0; n < powers.size(); ++n) {
    const double snr = powers[n] * gains[n] / (rp.noise_w + interference(n));
    out.per_rb_bits[n] = std::log2(1.0 + snr);
    total += out.per_rb_bits[n];
  }
  out.rate = rp.scale() * total;
  return out;
}

template <typename InterferenceAt>
RateResult fbl_impl(std::span<const double> powers, std::span<const double> gains,
                    const RateParams& rp, InterferenceAt interference, std::int64_t blocklength,
                    double block_error) {
  if (powers.size() != gains.size()) throw std::invalid_argument("fbl_rate: size mismatch");
  if (blocklength < 2) throw std::invalid_argument("fbl_rate: blocklength must be >= 2");
  const double qinv = inverse_q(block_error);
  RateResult out;
  out.per_rb_bits.resize(powers.size());
  double total = 0.0;
  for (std::size_t n = 0; n < powers.size(); ++n) {
    if (powers[n] <= 0.0) {
      out.per_rb_bits[n] = 0.0;
      continue;
    }
    const double snr = powers[n] * gains[n] / (rp.noise_w + interference(n));
    out.per_rb_bits[n] = std::max(0.0, fbl_spectral_efficiency(snr, blocklength, qinv));
    total += out.per_rb_bits[n];
  }
  out.rate = rp.scale() * total;
  return out;
}

std::span<const double> checked(std::span<const double> interference, std::size_t n) {
  if (interference.size() != n) throw std::invalid_argument("rate: interference size mismatch");
  return interference;
}

}  // namespace

RateResult shannon_rate(std::span<const double> powers, std::span<const double> gains,
                        const RateParams& rp, double interference_w) {
  return shannon_impl(powers, gains, rp, [&](std::size_t) { return interference_w; });
}

RateResult shannon_rate(std::span<const double> powers, std::span<const double> gains,
                        const RateParams& rp, std::span<const double> interference_w) {
  const auto i = checked(interference_w, powers.size());
  return shannon_impl(powers, gains, rp, [&](std::size_t n) { return i[n]; });
}

RateResult fbl_rate(std::span<const double> powers, std::span<const double> gains,
                    const RateParams& rp, double interference_w, std::int64_t blocklength,
                    double block_error) {
  return fbl_impl(powers, gains, rp, [&](std::size_t) { return interference_w; }, blocklength,
                  block_error);
}

RateResult fbl_rate(std::span<const double> powers, std::span<const double> gains,
                    const RateParams& rp, std::span<const double> interference_w,
                    std::int64_t blocklength, double block_error) {
  const auto i = checked(interference_w, powers.size());
  return fbl_impl(powers, gains, rp, [&](std::size_t n) { return i[n]; }, blocklength,
                  block_error);
}

}  // namespace aoiv2v
