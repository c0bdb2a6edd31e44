#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoiv2v/config.hpp"
#include "aoiv2v/mobility.hpp"
#include "aoiv2v/rng.hpp"

namespace aoiv2v {

enum class LinkRegime { kLos, kWlos, kNlos };

struct PathLossParams {
  double l0 = db_to_linear(-68.5);
  double l0_prime = db_to_linear(-54.5);
  double alpha = 1.61;
  double intersection_m = 15.0;

  static PathLossParams from_config(const SimConfig& cfg) {
    return {cfg.l0, cfg.l0_prime, cfg.alpha, cfg.intersection_m};
  }
};

/// Same road (either lane) is line of sight on the l2 distance. Perpendicular
/// roads are weak line of sight on the l1 distance when either end is within
/// `intersection_m` of the shared crossing, non line of sight otherwise.
/// Parallel but distinct roads are non line of sight. Every distance (and
/// each factor of the NLOS product) is clamped to at least 1 m; all
/// distances use the torus minimum image.
LinkRegime classify_link(const VehicleState& tx, const VehicleState& rx, const RoadGrid& grid,
                         const PathLossParams& p);
double path_loss(const VehicleState& tx, const VehicleState& rx, const RoadGrid& grid,
                 const PathLossParams& p);

/// Unit-mean exponential power coefficient (Rayleigh block fading).
double sample_fading(Rng& rng);

struct RateParams {
  double bandwidth_hz = 180e3;
  double slot_s = 3e-3;
  double packet_bits = 4000.0;
  double noise_w = 0.0;  // N0 * bandwidth

  static RateParams from_config(const SimConfig& cfg) {
    return {cfg.bandwidth_hz, cfg.slot_s, cfg.packet_bits, cfg.noise_w()};
  }
  double scale() const { return bandwidth_hz * slot_s / packet_bits; }
};

struct RateResult {
  double rate = 0.0;                  // packets per slot
  std::vector<double> per_rb_bits;    // per-RB spectral term, bits/s/Hz
};

/// Per-RB interference may be given as one constant or per RB.
RateResult shannon_rate(std::span<const double> powers, std::span<const double> gains,
                        const RateParams& rp, double interference_w);
RateResult shannon_rate(std::span<const double> powers, std::span<const double> gains,
                        const RateParams& rp, std::span<const double> interference_w);

/// Normal-approximation rate, per-RB term clamped at 0 and exactly 0 when
/// the power on that RB is 0.
RateResult fbl_rate(std::span<const double> powers, std::span<const double> gains,
                    const RateParams& rp, double interference_w, std::int64_t blocklength,
                    double block_error);
RateResult fbl_rate(std::span<const double> powers, std::span<const double> gains,
                    const RateParams& rp, std::span<const double> interference_w,
                    std::int64_t blocklength, double block_error);

/// Channel dispersion in bits^2.
double dispersion(double snr);
/// Unclamped finite-blocklength spectral efficiency for one RB.
double fbl_spectral_efficiency(double snr, std::int64_t blocklength, double qinv);

/// Gaussian tail function Q(x) = P(N(0,1) > x).
double q_function(double x);
/// Inverse of q_function; accurate to ~1e-12 for eps in (1e-300, 1).
double inverse_q(double eps);

}  // namespace aoiv2v
