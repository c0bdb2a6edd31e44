#pragma once

namespace aoiv2v {

/// Threshold-violation event with its excess X and squared excess Y = X^2.
/// Excesses are zero when the event did not occur.
struct Violation {
  bool occurred = false;
  double excess = 0.0;
  double excess_sq = 0.0;
};

/// Periodic arrivals: event Q > R - psi (strict), excess Q - R + psi.
Violation violation_d(double queue, double rate, double psi);

/// Poisson arrivals: event A_t > R (strict), excess A_t - R.
Violation violation_m(double arrivals, double rate);

/// The queue-side event frequency upper-bounds Pr{age > d_D}; the bound is
/// the frequency itself.
double aoi_bound_d(double event_frequency);

/// Pr{age > d_M} = e^{-lambda d_M / tau} + p (1 - e^{-lambda d_M / tau}).
double aoi_prob_m(double event_probability, double lambda, double d_m_s, double slot_s);

}  // namespace aoiv2v
