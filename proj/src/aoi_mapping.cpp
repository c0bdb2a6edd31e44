#include "aoiv2v/aoi_mapping.hpp"

#include <cmath>

namespace aoiv2v {

Violation violation_d(double queue, double rate, double psi) {
  Violation v;
  if (queue > rate - psi) {
    v.occurred = true;
    v.excess = queue - rate + psi;
    v.excess_sq = v.excess * v.excess;
  }
  return v;
}

Violation violation_m(double arrivals, double rate) {
  Violation v;
  if (arrivals > rate) {
    v.occurred = true;
    v.excess = arrivals - rate;
    v.excess_sq = v.excess * v.excess;
  }
  return v;
}

double aoi_bound_d(double event_frequency) { return event_frequency; }

double aoi_prob_m(double event_probability, double lambda, double d_m_s, double slot_s) {
  const double idle = std::exp(-lambda * d_m_s / slot_s);
  return idle + event_probability * (1.0 - idle);
}

}  // namespace aoiv2v
