#include "aoiv2v/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "aoiv2v/aoi_mapping.hpp"
#include "aoiv2v/channel.hpp"
#include "aoiv2v/clustering.hpp"
#include "aoiv2v/lyapunov.hpp"
#include "aoiv2v/mobility.hpp"
#include "aoiv2v/rng.hpp"
#include "aoiv2v/traffic.hpp"

namespace aoiv2v {

namespace {

// Ages within this relative distance of the threshold count as not exceeding.
constexpr double kAgeTieTolerance = 1e-9;

struct PairState {
  QueueState queue;
  AoiTracker tracker;
  VirtualQueues vq;
  double last_service = 0.0;  // R_k(t-1), feeds the weight's indicator
  std::vector<double> gains;  // direct link gain per allocated RB
  std::vector<double> powers;
  std::vector<double> interference;
  std::int64_t window_exceed = 0;
  std::int64_t window_events = 0;
};

class Engine {
 public:
  Engine(const SimConfig& cfg, double i0_w, const RunHooks& hooks)
      : cfg_(cfg),
        derived_(derive_params(cfg)),
        hooks_(hooks),
        i0_w_(i0_w),
        rate_params_(RateParams::from_config(cfg)),
        pl_params_(PathLossParams::from_config(cfg)),
        mobility_rng_(make_rng(cfg.seed, Stream::kMobility)),
        fading_rng_(make_rng(cfg.seed, Stream::kFading)),
        arrivals_rng_(make_rng(cfg.seed, Stream::kArrivals)),
        errors_rng_(make_rng(cfg.seed, Stream::kBlockErrors)),
        cluster_rng_(make_rng(cfg.seed, Stream::kClustering)) {
    topo_ = init_topology(cfg_, mobility_rng_);
    const auto k = static_cast<std::size_t>(cfg_.num_pairs);
    pairs_.reserve(k);
    for (std::size_t i = 0; i < k; ++i) pairs_.emplace_back(PairState{{}, AoiTracker(hooks.keep_event_logs), {}, 0.0, {}, {}, {}, 0, 0});
    pl_cache_.assign(k * k, 0.0);
    pl_stamp_.assign(k * k, -1);
    qinv_ = cfg_.rate_model == RateModel::kFiniteBlocklength ? inverse_q(cfg_.block_error) : 0.0;
  }

  MetricsReport run();

 private:
  void recluster(std::int64_t slot);
  double link_gain(int from, int to, std::int64_t slot);
  void decide_powers(std::int64_t slot, const std::vector<int>& arrivals_count,
                     std::vector<double>& weights, std::vector<bool>& indicators);
  double achieved_rate(int k);
  void finalize(MetricsReport& report, std::int64_t window_start);

  SimConfig cfg_;
  DerivedParams derived_;
  const RunHooks& hooks_;
  double i0_w_;
  RateParams rate_params_;
  PathLossParams pl_params_;
  Rng mobility_rng_, fading_rng_, arrivals_rng_, errors_rng_, cluster_rng_;
  Topology topo_;
  std::vector<PairState> pairs_;
  std::vector<std::vector<int>> rbs_;
  std::vector<std::vector<int>> rb_users_;   // pairs per RB
  std::vector<std::vector<int>> rb_index_;   // [pair][rb] -> position in rbs_[pair] or -1
  std::vector<double> pl_cache_;
  std::vector<std::int64_t> pl_stamp_;
  double qinv_ = 0.0;
  double interference_sum_ = 0.0;
  std::int64_t interference_count_ = 0;
};

void Engine::recluster(std::int64_t slot) {
  const auto mids = pair_midpoints(topo_.grid, topo_.pairs);
  const auto f = similarity(topo_.grid, mids, cfg_.gamma_m, cfg_.phi_m);
  const auto labels = spectral_cluster(f, cfg_.groups, cluster_rng_).labels;
  rbs_ = allocate_rbs(labels, cfg_.num_rbs);
  rb_users_.assign(static_cast<std::size_t>(cfg_.num_rbs), {});
  rb_index_.assign(pairs_.size(), std::vector<int>(static_cast<std::size_t>(cfg_.num_rbs), -1));
  for (std::size_t k = 0; k < rbs_.size(); ++k) {
    for (std::size_t j = 0; j < rbs_[k].size(); ++j) {
      rb_users_[rbs_[k][j]].push_back(static_cast<int>(k));
      rb_index_[k][rbs_[k][j]] = static_cast<int>(j);
    }
    auto& p = pairs_[k];
    p.gains.assign(rbs_[k].size(), 0.0);
    p.powers.assign(rbs_[k].size(), 0.0);
    p.interference.assign(rbs_[k].size(), 0.0);
  }
  if (hooks_.on_cluster) hooks_.on_cluster(ClusterEpoch{slot, labels, rbs_});
}

double Engine::link_gain(int from, int to, std::int64_t slot) {
  const std::size_t idx = static_cast<std::size_t>(from) * pairs_.size() + static_cast<std::size_t>(to);
  if (pl_stamp_[idx] != slot) {
    pl_cache_[idx] = path_loss(topo_.pairs[from].tx, topo_.pairs[to].rx, topo_.grid, pl_params_);
    pl_stamp_[idx] = slot;
  }
  return pl_cache_[idx];
}

void Engine::decide_powers(std::int64_t /*slot*/, const std::vector<int>& arrivals_count,
                           std::vector<double>& weights, std::vector<bool>& indicators) {
  const double noise_i0 = cfg_.noise_w() + i0_w_;
  const bool tail_terms = cfg_.policy == Policy::kProposed;
  const double scale = cfg_.rate_scale();
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    auto& p = pairs_[k];
    const double q = p.queue.length;
    bool ind = false;
    double w = 0.0;
    if (cfg_.arrival_model == ArrivalModel::kDeterministic) {
      ind = violation_d(q, p.last_service, derived_.psi).occurred;
      w = weight_d(p.vq, q, derived_.packets_per_slot, derived_.psi, cfg_.epsilon_k, ind, scale,
                   tail_terms);
    } else {
      const double a = arrivals_count[k];
      ind = violation_m(a, p.last_service).occurred;
      w = weight_m(p.vq, q, a, derived_.e_k, ind, scale, tail_terms);
    }
    weights[k] = w;
    indicators[k] = ind;
    const std::size_t m = p.gains.size();
    if (m == 0) continue;
    if (cfg_.policy == Policy::kFixedPower) {
      std::fill(p.powers.begin(), p.powers.end(), cfg_.p_max_w / static_cast<double>(m));
    } else if (cfg_.rate_model == RateModel::kShannon) {
      p.powers = waterfill(w, p.gains, cfg_.v, cfg_.p_max_w, noise_i0).powers;
    } else {
      p.powers = ccp_solve(w, p.gains, cfg_.v, cfg_.p_max_w, noise_i0, derived_.blocklength,
                           cfg_.block_error, {cfg_.ccp_tolerance, cfg_.ccp_max_iter})
                     .powers;
    }
  }
}

double Engine::achieved_rate(int k) {
  auto& p = pairs_[static_cast<std::size_t>(k)];
  if (p.gains.empty()) return 0.0;
  if (cfg_.rate_model == RateModel::kShannon) {
    return shannon_rate(p.powers, p.gains, rate_params_, p.interference).rate;
  }
  auto r = fbl_rate(p.powers, p.gains, rate_params_, p.interference, derived_.blocklength,
                    cfg_.block_error);
  if (cfg_.block_error_granularity == BlockErrorGranularity::kPerSlot) {
    return fbl_service(r.rate, cfg_.block_error, errors_rng_);
  }
  double served = 0.0;
  for (double bits : r.per_rb_bits) {
    served += fbl_service(bits, cfg_.block_error, errors_rng_);
  }
  return rate_params_.scale() * served;
}

MetricsReport Engine::run() {
  MetricsReport report;
  report.config = cfg_;
  const std::int64_t slots = cfg_.slots;
  const std::int64_t window_start =
      static_cast<std::int64_t>(std::floor(cfg_.warmup_fraction * static_cast<double>(slots)));
  const auto k_count = pairs_.size();
  const double tau = cfg_.slot_s;
  const double threshold = cfg_.arrival_model == ArrivalModel::kDeterministic ? cfg_.d_d_s
                                                                               : cfg_.d_m_s;
  report.aoi_samples.reserve(static_cast<std::size_t>(slots - window_start) * k_count);
  report.mean_queue.reserve(static_cast<std::size_t>(slots));
  report.mean_power.reserve(static_cast<std::size_t>(slots));
  report.mean_vr.reserve(static_cast<std::size_t>(slots));

  std::vector<std::vector<double>> instants(k_count);
  std::vector<int> counts(k_count, 0);
  std::vector<double> weights(k_count, 0.0);
  std::vector<bool> indicators(k_count, false);
  Summary& s = report.summary;
  double sum_power = 0.0, sum_queue = 0.0, sum_service = 0.0, sum_aoi = 0.0;
  double sum_excess = 0.0, sum_excess_sq = 0.0;
  std::int64_t exceed = 0;
  const bool exact = cfg_.interference_mode == InterferenceMode::kExact;

  for (std::int64_t t = 0; t < slots; ++t) {
    if (should_recluster(t, cfg_.t0_slots)) recluster(t);
    step_mobility(topo_, tau, mobility_rng_);

    // Direct channels.
    for (std::size_t k = 0; k < k_count; ++k) {
      auto& p = pairs_[k];
      const double pl = link_gain(static_cast<int>(k), static_cast<int>(k), t);
      for (auto& g : p.gains) g = pl * sample_fading(fading_rng_);
    }
    // Arrivals for this slot.
    for (std::size_t k = 0; k < k_count; ++k) {
      if (cfg_.arrival_model == ArrivalModel::kDeterministic) {
        instants[k] = arrivals_deterministic(t, derived_.packets_per_slot, tau);
        counts[k] = static_cast<int>(instants[k].size());
      } else {
        auto a = arrivals_poisson(arrivals_rng_, derived_.lambda, t, tau);
        counts[k] = a.count;
        instants[k] = std::move(a.instants);
      }
    }

    decide_powers(t, counts, weights, indicators);

    // Interference actually seen at each receiver.
    for (std::size_t k = 0; k < k_count; ++k) {
      auto& p = pairs_[k];
      for (std::size_t j = 0; j < p.interference.size(); ++j) {
        if (!exact) {
          p.interference[j] = i0_w_;
          continue;
        }
        const int rb = rbs_[k][j];
        double total = 0.0;
        for (int other : rb_users_[static_cast<std::size_t>(rb)]) {
          if (other == static_cast<int>(k)) continue;
          const double fade = sample_fading(fading_rng_);
          const int oj = rb_index_[static_cast<std::size_t>(other)][static_cast<std::size_t>(rb)];
          const double pw = pairs_[static_cast<std::size_t>(other)].powers[static_cast<std::size_t>(oj)];
          total += pw * link_gain(other, static_cast<int>(k), t) * fade;
        }
        p.interference[j] = total;
        if (p.powers[j] > 0) {
          interference_sum_ += total;
          ++interference_count_;
        }
      }
    }

    const double now = static_cast<double>(t + 1) * tau;
    const bool in_window = t >= window_start;
    double slot_queue = 0.0, slot_power = 0.0, slot_vr = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      auto& p = pairs_[k];
      const double service = achieved_rate(static_cast<int>(k));
      const double q_before = p.queue.length;
      const double power = std::accumulate(p.powers.begin(), p.powers.end(), 0.0);
      if (power > cfg_.p_max_w * (1.0 + 1e-9)) ++s.budget_violations;

      const Violation ev = cfg_.arrival_model == ArrivalModel::kDeterministic
                               ? violation_d(q_before, service, derived_.psi)
                               : violation_m(counts[k], service);
      if (cfg_.arrival_model == ArrivalModel::kDeterministic) {
        p.vq = update_vq_d(p.vq, q_before, service, derived_.packets_per_slot, derived_.psi,
                           cfg_.h_cap, cfg_.b_cap, cfg_.epsilon_k,
                           cfg_.policy == Policy::kProposed);
      } else {
        p.vq = update_vq_m(p.vq, q_before, service, counts[k], cfg_.h_cap, cfg_.b_cap,
                           derived_.e_k, cfg_.policy == Policy::kProposed);
      }
      p.queue = update_queue(p.queue, service, counts[k]);
      p.tracker.record_arrivals(instants[k]);
      const double age = p.tracker.advance(p.queue, now);
      p.last_service = service;

      slot_queue += q_before;
      slot_power += power;
      slot_vr += p.vq.r;
      if (in_window) {
        report.aoi_samples.push_back(age);
        sum_aoi += age;
        s.worst_aoi_s = std::max(s.worst_aoi_s, age);
        sum_power += power;
        sum_queue += q_before;
        sum_service += service;
        if (age > threshold * (1.0 + kAgeTieTolerance)) {
          ++exceed;
          ++p.window_exceed;
        }
        if (ev.occurred) {
          ++s.event_count;
          ++p.window_events;
          sum_excess += ev.excess;
          sum_excess_sq += ev.excess_sq;
          report.excess_samples.push_back(ev.excess);
        }
      }
      if (hooks_.on_trace) {
        const auto& vp = topo_.pairs[k];
        hooks_.on_trace(TraceRow{t, static_cast<int>(k), vp.tx.position.x, vp.tx.position.y,
                                 vp.rx.position.x, vp.rx.position.y, weights[k], power, service,
                                 q_before, age, p.vq.x, p.vq.y, p.vq.r, p.vq.q, indicators[k]});
      }
      if (hooks_.on_age_check && hooks_.keep_event_logs && hooks_.age_check_stride > 0 &&
          t % hooks_.age_check_stride == 0) {
        hooks_.on_age_check(t, static_cast<int>(k), age, age_from_log(p.tracker.log(), now));
      }
    }
    const double kd = static_cast<double>(k_count);
    report.mean_queue.push_back(slot_queue / kd);
    report.mean_power.push_back(slot_power / kd);
    report.mean_vr.push_back(slot_vr / kd);
  }

  s.slots = slots;
  s.warmup_slots = window_start;
  s.samples = static_cast<std::int64_t>(report.aoi_samples.size());
  s.age_threshold_s = threshold;
  s.i0_w = i0_w_;
  s.psi = derived_.psi;
  s.e_k = derived_.e_k;
  s.blocklength = derived_.blocklength;
  s.packets_per_slot = derived_.packets_per_slot;
  s.mean_interference_w =
      interference_count_ > 0 ? interference_sum_ / static_cast<double>(interference_count_) : 0.0;
  if (s.samples > 0) {
    const double n = static_cast<double>(s.samples);
    s.avg_aoi_s = sum_aoi / n;
    s.avg_power_w = sum_power / n;
    s.avg_queue_pkts = sum_queue / n;
    s.avg_service_pkts = sum_service / n;
    s.pr_aoi_exceeds = static_cast<double>(exceed) / n;
    s.pr_event = static_cast<double>(s.event_count) / n;
    std::vector<double> tmp = report.aoi_samples;
    auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2);
    std::nth_element(tmp.begin(), mid, tmp.end());
    s.median_aoi_s = *mid;
  }
  s.aoi_bound = cfg_.arrival_model == ArrivalModel::kDeterministic
                    ? aoi_bound_d(s.pr_event)
                    : aoi_prob_m(s.pr_event, derived_.lambda, cfg_.d_m_s, tau);
  if (s.event_count > 0) {
    s.mean_excess = sum_excess / static_cast<double>(s.event_count);
    s.mean_excess_sq = sum_excess_sq / static_cast<double>(s.event_count);
  }
  const std::int64_t window = slots - window_start;
  for (const auto& p : pairs_) {
    const double w = window > 0 ? static_cast<double>(window) : 1.0;
    report.pair_pr_aoi_exceeds.push_back(static_cast<double>(p.window_exceed) / w);
    report.pair_pr_event.push_back(static_cast<double>(p.window_events) / w);
  }
  if (report.excess_samples.size() >= kGpdMinSamples) {
    try {
      report.excess_fit = fit_gpd(report.excess_samples);
      report.excess_ks = ks_distance(report.excess_samples, report.excess_fit->params);
    } catch (const std::invalid_argument&) {
      // Degenerate excess sample; leave the fit empty.
    }
  }
  return report;
}

}  // namespace

double calibrate_i0(const SimConfig& cfg) {
  SimConfig pilot = cfg;
  pilot.policy = Policy::kFixedPower;
  pilot.interference_mode = InterferenceMode::kExact;
  pilot.slots = cfg.i0_pilot_slots;
  pilot.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
  pilot.i0_w = 0.0;
  RunHooks none;
  Engine engine(pilot, 0.0, none);
  return engine.run().summary.mean_interference_w;
}

MetricsReport run(const SimConfig& cfg, const RunHooks& hooks) {
  validate(cfg);
  derive_params(cfg);
  const double i0 = cfg.i0_w ? *cfg.i0_w : calibrate_i0(cfg);
  Engine engine(cfg, i0, hooks);
  return engine.run();
}

std::vector<std::pair<double, double>> ccdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ccdf: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    out.emplace_back(samples[i], static_cast<double>(samples.size() - j) / n);
    i = j;
  }
  return out;
}

double survival_at(const std::vector<double>& sorted_samples, double x) {
  if (sorted_samples.empty()) throw std::invalid_argument("survival_at: empty sample");
  const auto it = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
  return static_cast<double>(sorted_samples.end() - it) /
         static_cast<double>(sorted_samples.size());
}

std::vector<std::pair<double, double>> thin_ccdf(
    const std::vector<std::pair<double, double>>& points, double rel_step) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool edge = i == 0 || i + 1 == points.size();
    if (edge || out.empty() ||
        std::abs(points[i].second - out.back().second) >= rel_step * out.back().second) {
      out.push_back(points[i]);
    }
  }
  return out;
}

SweepParam parse_sweep_param(const std::string& s) {
  if (s == "v") return SweepParam::kV;
  if (s == "arrival_rate") return SweepParam::kArrivalRate;
  if (s == "blocklength") return SweepParam::kBlocklength;
  if (s == "block_error") return SweepParam::kBlockError;
  if (s == "seed") return SweepParam::kSeed;
  throw ConfigError("param", "unknown sweep parameter '" + s + "'");
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kV: return "v";
    case SweepParam::kArrivalRate: return "arrival_rate";
    case SweepParam::kBlocklength: return "blocklength";
    case SweepParam::kBlockError: return "block_error";
    case SweepParam::kSeed: return "seed";
  }
  return "?";
}

SimConfig with_param(SimConfig cfg, SweepParam param, double value) {
  switch (param) {
    case SweepParam::kV: cfg.v = value; break;
    case SweepParam::kArrivalRate: cfg.arrival_rate_bps = value; break;
    case SweepParam::kBlocklength:
      cfg.blocklength_override = static_cast<std::int64_t>(std::llround(value));
      cfg.slot_s = value / cfg.bandwidth_hz;
      break;
    case SweepParam::kBlockError: cfg.block_error = value; break;
    case SweepParam::kSeed: cfg.seed = static_cast<std::uint64_t>(value); break;
  }
  return cfg;
}

std::vector<MetricsReport> run_all(const std::vector<SimConfig>& cfgs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<MetricsReport> out(cfgs.size());
  std::size_t next = 0;
  while (next < cfgs.size()) {
    std::vector<std::future<MetricsReport>> batch;
    const std::size_t end = std::min(cfgs.size(), next + threads);
    if (threads == 1) {
      out[next] = run(cfgs[next]);
      ++next;
      continue;
    }
    for (std::size_t i = next; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&cfgs, i] { return run(cfgs[i]); }));
    }
    for (std::size_t i = next; i < end; ++i) out[i] = batch[i - next].get();
    next = end;
  }
  return out;
}

std::vector<MetricsReport> sweep(const SimConfig& cfg, SweepParam param,
                                 const std::vector<double>& values, std::uint64_t seed_stride,
                                 unsigned threads) {
  std::vector<SimConfig> cfgs;
  cfgs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SimConfig c = with_param(cfg, param, values[i]);
    if (param != SweepParam::kSeed) c.seed = cfg.seed + seed_stride * i;
    validate(c);
    derive_params(c);
    cfgs.push_back(std::move(c));
  }
  return run_all(cfgs, threads);
}

}  // namespace aoiv2v
