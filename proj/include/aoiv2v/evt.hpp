#pragma once

#include <span>

#include "aoiv2v/rng.hpp"

namespace aoiv2v {

/// Generalized Pareto distribution, scale > 0, shape < 1/2.
struct GpdParams {
  double sigma = 1.0;
  double xi = 0.0;
};

/// |xi| below this uses the exponential form.
inline constexpr double kGpdXiZero = 1e-8;

double gpd_cdf(double x, const GpdParams& p);
double gpd_ccdf(double x, const GpdParams& p);
/// Draws by inversion.
double gpd_sample(Rng& rng, const GpdParams& p);

struct GpdMoments {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment() const { return variance + mean * mean; }
};
GpdMoments gpd_moments(const GpdParams& p);

/// Mean and second-moment caps implied by thresholds on scale and shape.
struct ExcessCaps {
  double h = 0.0;  // mean cap
  double b = 0.0;  // second-moment cap
};
ExcessCaps hb_caps(double sigma_th, double xi_th);

struct GpdFit {
  GpdParams params;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr std::size_t kGpdMinSamples = 30;

/// Maximum-likelihood fit over sigma > 0, xi in [-1, 0.499], by projected
/// BFGS on (log sigma, xi) started from the method-of-moments estimate.
/// Throws std::invalid_argument for fewer than kGpdMinSamples samples,
/// negative samples, or a sample set with no spread.
GpdFit fit_gpd(std::span<const double> excesses);

double gpd_log_likelihood(std::span<const double> excesses, const GpdParams& p);

/// Kolmogorov-Smirnov sup distance between the ECDF and the GPD cdf.
/// Throws std::invalid_argument on an empty sample.
double ks_distance(std::span<const double> samples, const GpdParams& p);

}  // namespace aoiv2v
