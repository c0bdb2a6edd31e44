#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "aoiv2v/config.hpp"
#include "aoiv2v/evt.hpp"

namespace aoiv2v {

/// Summary statistics over the post-warm-up window, pooled over pairs.
struct Summary {
  std::int64_t slots = 0;
  std::int64_t warmup_slots = 0;
  std::int64_t samples = 0;          // pair-slot samples in the window
  double age_threshold_s = 0.0;      // d_D or d_M, by arrival model
  double avg_aoi_s = 0.0;
  double median_aoi_s = 0.0;
  double worst_aoi_s = 0.0;
  double avg_power_w = 0.0;          // per pair per slot, summed over RBs
  double avg_queue_pkts = 0.0;
  double avg_service_pkts = 0.0;
  double pr_aoi_exceeds = 0.0;       // Pr{age > threshold}
  double pr_event = 0.0;             // Pr{Q > R - psi} or Pr{A > R}
  double aoi_bound = 0.0;            // age-tail prediction from pr_event
  std::int64_t event_count = 0;
  double mean_excess = 0.0;
  double mean_excess_sq = 0.0;
  std::int64_t budget_violations = 0;
  double mean_interference_w = 0.0; // measured on active RBs
  double i0_w = 0.0;                 // constant used by the controller
  double psi = 0.0;
  double e_k = 0.0;
  std::int64_t blocklength = 0;
  double packets_per_slot = 0.0;
};

struct MetricsReport {
  SimConfig config;
  Summary summary;
  std::vector<double> aoi_samples;      // window, pooled over pairs
  std::vector<double> excess_samples;   // X for each event in the window
  std::vector<double> mean_queue;       // per slot, averaged over pairs
  std::vector<double> mean_power;       // per slot, averaged over pairs
  std::vector<double> mean_vr;          // per slot, averaged over pairs
  std::vector<double> pair_pr_aoi_exceeds;  // per pair, window
  std::vector<double> pair_pr_event;        // per pair, window
  std::optional<GpdFit> excess_fit;
  std::optional<double> excess_ks;
};

struct TraceRow {
  std::int64_t slot;
  int pair;
  double tx_x, tx_y, rx_x, rx_y;
  double weight;
  double power_w;
  double service_pkts;
  double queue_pkts;
  double aoi_s;
  double vx, vy, vr, vq;
  bool indicator;
};

struct ClusterEpoch {
  std::int64_t slot;
  std::vector<int> labels;
  std::vector<std::vector<int>> rbs;
};

struct RunHooks {
  std::function<void(const TraceRow&)> on_trace;
  std::function<void(const ClusterEpoch&)> on_cluster;
  /// Called once per pair per slot with that pair's tracker age and an
  /// independent recomputation from its full event log (for validation).
  bool keep_event_logs = false;
  std::function<void(std::int64_t slot, int pair, double tracker_age, double log_age)>
      on_age_check;
  std::int64_t age_check_stride = 100;
};

/// Runs one replication. Throws ConfigError for infeasible configurations.
MetricsReport run(const SimConfig& cfg, const RunHooks& hooks = {});

/// Mean interference per active RB measured by a short fixed-power run.
double calibrate_i0(const SimConfig& cfg);

/// Empirical survival function at sorted unique values: (x, Pr{X > x}).
/// Throws std::invalid_argument on an empty sample.
std::vector<std::pair<double, double>> ccdf(std::vector<double> samples);
/// Empirical Pr{X > x}.
double survival_at(const std::vector<double>& sorted_samples, double x);

/// Keeps the first and last points and every point whose probability moved
/// by at least `rel_step` (relative) since the last kept point.
std::vector<std::pair<double, double>> thin_ccdf(
    const std::vector<std::pair<double, double>>& points, double rel_step = 0.01);

enum class SweepParam { kV, kArrivalRate, kBlocklength, kBlockError, kSeed };
SweepParam parse_sweep_param(const std::string& s);
std::string_view to_string(SweepParam p);

/// Applies one sweep value to a config. Blocklength changes the slot length
/// (tau = L / omega) and pins L.
SimConfig with_param(SimConfig cfg, SweepParam param, double value);

/// Independent runs, one per value, using the base seed plus
/// `seed_stride * index`. Reports come back in value order.
std::vector<MetricsReport> sweep(const SimConfig& cfg, SweepParam param,
                                 const std::vector<double>& values,
                                 std::uint64_t seed_stride = 0, unsigned threads = 0);

/// Runs independent configs, at most `threads` at a time (0: hardware).
std::vector<MetricsReport> run_all(const std::vector<SimConfig>& cfgs, unsigned threads = 0);

}  // namespace aoiv2v
