#include "aoiv2v/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoiv2v {

namespace {
// Slack on the cumulative-service axis so that a packet whose last fraction
// is served up to rounding still departs.
constexpr double kServiceSlack = 1e-9;
}  // namespace

QueueState update_queue(const QueueState& q, double service, double arrivals) {
  if (service < 0 || arrivals < 0) {
    throw std::invalid_argument("update_queue: service and arrivals must be >= 0");
  }
  QueueState out = q;
  const double served = std::min(service, q.length);
  out.length = std::max(q.length - service, 0.0) + arrivals;
  out.cumulative_service += served;
  out.cumulative_arrivals += arrivals;
  return out;
}

std::vector<double> arrivals_deterministic(std::int64_t slot, double packets_per_slot,
                                           double slot_s) {
  std::vector<double> out;
  if (packets_per_slot <= 0) return out;
  // Indices i with i/A in [slot, slot + 1).
  constexpr double kTol = 1e-9;
  const auto first = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(slot) * packets_per_slot - kTol));
  const auto last = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(slot + 1) * packets_per_slot - kTol));
  for (std::int64_t i = first; i < last; ++i) {
    out.push_back(static_cast<double>(i) * slot_s / packets_per_slot);
  }
  return out;
}

SlotArrivals arrivals_poisson(Rng& rng, double lambda, std::int64_t slot, double slot_s) {
  SlotArrivals out;
  if (lambda <= 0) return out;
  std::poisson_distribution<int> count(lambda);
  out.count = count(rng);
  std::uniform_real_distribution<double> offset(0.0, slot_s);
  out.instants.reserve(static_cast<std::size_t>(out.count));
  const double start = static_cast<double>(slot) * slot_s;
  for (int i = 0; i < out.count; ++i) out.instants.push_back(start + offset(rng));
  std::sort(out.instants.begin(), out.instants.end());
  return out;
}

double fbl_service(double rate, double block_error, Rng& rng) {
  if (block_error <= 0) return rate;
  if (block_error >= 1) return 0.0;
  std::bernoulli_distribution fail(block_error);
  return fail(rng) ? 0.0 : rate;
}

void AoiTracker::record_arrivals(std::span<const double> instants) {
  for (double t : instants) {
    pending_.push_back(t);
    if (keep_log_) arrivals_log_.push_back(t);
  }
}

double AoiTracker::advance(const QueueState& q, double now) {
  while (!pending_.empty() &&
         q.cumulative_service + kServiceSlack >= static_cast<double>(departed_ + 1)) {
    const double arrival = pending_.front();
    pending_.pop_front();
    ++departed_;
    watermark_ = std::max(watermark_, arrival);
    if (keep_log_) log_.push_back({arrival, now});
  }
  return age(now);
}

double age_from_log(std::span<const AoiTracker::Event> events, double now) {
  double latest = 0.0;
  for (const auto& e : events) {
    if (e.departure <= now) latest = std::max(latest, e.arrival);
  }
  return now - latest;
}

}  // namespace aoiv2v
