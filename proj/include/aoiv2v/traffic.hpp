#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "aoiv2v/rng.hpp"

namespace aoiv2v {

/// Fluid FCFS queue in packet units.
struct QueueState {
  double length = 0.0;
  double cumulative_arrivals = 0.0;
  double cumulative_service = 0.0;  // work actually removed from the queue
};

/// Q' = max(Q - service, 0) + arrivals. Throws std::invalid_argument on
/// negative inputs.
QueueState update_queue(const QueueState& q, double service, double arrivals);

/// Arrival instants i*tau/A falling in [slot*tau, (slot+1)*tau).
std::vector<double> arrivals_deterministic(std::int64_t slot, double packets_per_slot,
                                           double slot_s);

struct SlotArrivals {
  int count = 0;
  std::vector<double> instants;  // sorted, inside the slot
};

/// Poisson(lambda) count with instants placed uniformly in the slot.
SlotArrivals arrivals_poisson(Rng& rng, double lambda, std::int64_t slot, double slot_s);

/// Full `rate` with probability 1 - block_error, else 0.
double fbl_service(double rate, double block_error, Rng& rng);

/// Exact per-packet age tracking on top of the fluid queue. Packet i (in
/// arrival order) has departed once cumulative service reaches i + 1.
/// Departures are credited at the end of the slot in which that happens.
class AoiTracker {
 public:
  explicit AoiTracker(bool keep_log = false) : keep_log_(keep_log) {}

  void record_arrivals(std::span<const double> instants);
  /// Releases every packet covered by `q.cumulative_service` as departed at
  /// time `now` and returns the age now - watermark.
  double advance(const QueueState& q, double now);

  double age(double now) const { return now - watermark_; }
  double watermark() const { return watermark_; }
  std::int64_t departed() const { return departed_; }
  std::size_t pending() const { return pending_.size(); }

  struct Event {
    double arrival = 0.0;
    double departure = 0.0;
  };
  /// Filled only when constructed with keep_log = true.
  const std::vector<Event>& log() const { return log_; }
  const std::vector<double>& all_arrivals() const { return arrivals_log_; }

 private:
  bool keep_log_;
  std::deque<double> pending_;
  std::int64_t departed_ = 0;
  double watermark_ = 0.0;
  std::vector<Event> log_;
  std::vector<double> arrivals_log_;
};

/// Age at time T recomputed from an event log: T minus the latest arrival
/// among packets with departure <= T (0 if none departed yet).
double age_from_log(std::span<const AoiTracker::Event> events, double now);

}  // namespace aoiv2v
