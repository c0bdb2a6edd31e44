#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aoiv2v {

enum class ArrivalModel { kDeterministic, kPoisson };
enum class RateModel { kShannon, kFiniteBlocklength };
enum class Policy { kProposed, kBaseline2, kFixedPower };
enum class InterferenceMode { kExact, kConstant };
enum class BlockErrorGranularity { kPerSlot, kPerRb };

std::string_view to_string(ArrivalModel m);
std::string_view to_string(RateModel m);
std::string_view to_string(Policy p);
std::string_view to_string(InterferenceMode m);
std::string_view to_string(BlockErrorGranularity g);

ArrivalModel parse_arrival_model(std::string_view s);
RateModel parse_rate_model(std::string_view s);
Policy parse_policy(std::string_view s);
InterferenceMode parse_interference_mode(std::string_view s);
BlockErrorGranularity parse_block_error_granularity(std::string_view s);

/// Raised for unreadable or invalid configuration. `field()` names the
/// offending key (snake_case, as in the config file) when one applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double watts_to_dbm(double w);

/// All run parameters. Powers are in watts, gains linear, sizes in bits,
/// times in seconds. Defaults are the reference scenario values.
struct SimConfig {
  int num_pairs = 20;             // K
  int num_rbs = 20;               // N
  double bandwidth_hz = 180e3;    // per-RB bandwidth
  double slot_s = 3e-3;           // slot duration
  double p_max_w = dbm_to_watts(23.0);
  double packet_bits = 500.0 * 8.0;
  double n0_w_per_hz = dbm_to_watts(-174.0);
  double arrival_rate_bps = 0.5e6;
  double d_d_s = 30e-3;           // age threshold, periodic arrivals
  double d_m_s = 60e-3;           // age threshold, Poisson arrivals
  double epsilon_k = 1e-3;        // AoI violation tolerance
  double h_cap = 0.05;            // cap on mean excess (packets)
  double b_cap = 0.0033;          // cap on second moment of excess (packets^2)
  double v = 0.0;                 // drift-plus-penalty weight
  int groups = 10;
  double gamma_m = 30.0;
  double phi_m = 150.0;
  int t0_slots = 100;
  double alpha = 1.61;
  double intersection_m = 15.0;
  double l0 = db_to_linear(-68.5);
  double l0_prime = db_to_linear(-54.5);
  double block_error = 1e-5;
  std::optional<double> i0_w;     // empty: calibrated by a pilot run
  int i0_pilot_slots = 500;
  double area_side_m = 250.0;
  double block_spacing_m = 62.5;
  double lane_offset_m = 2.0;
  double speed_kmh = 60.0;
  double pair_distance_m = 15.0;
  std::uint64_t seed = 1;
  std::int64_t slots = 10000;
  double warmup_fraction = 0.1;
  ArrivalModel arrival_model = ArrivalModel::kDeterministic;
  RateModel rate_model = RateModel::kShannon;
  Policy policy = Policy::kProposed;
  InterferenceMode interference_mode = InterferenceMode::kExact;
  BlockErrorGranularity block_error_granularity = BlockErrorGranularity::kPerSlot;
  std::optional<double> psi_override;
  std::optional<std::int64_t> blocklength_override;
  double ccp_tolerance = 1e-6;
  int ccp_max_iter = 30;

  double speed_mps() const { return speed_kmh / 3.6; }
  double noise_w() const { return n0_w_per_hz * bandwidth_hz; }
  /// Packets per slot delivered per bit/s/Hz of spectral efficiency.
  double rate_scale() const { return bandwidth_hz * slot_s / packet_bits; }
};

/// Constants computed from a SimConfig.
struct DerivedParams {
  double packets_per_slot = 0.0;  // A
  double lambda = 0.0;            // mean packets per slot
  double psi = 0.0;
  double e_k = 0.0;               // effective tolerance for Poisson arrivals
  std::int64_t blocklength = 0;   // L, channel uses per RB per slot
};

/// Checks every range invariant; throws ConfigError naming the field.
void validate(const SimConfig& cfg);

/// Reads a JSON object of snake_case overrides. An empty file yields the
/// defaults. Unknown keys are rejected.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(std::string_view text);

/// Throws ConfigError when the model-relevant feasibility check fails:
/// undersampling for periodic arrivals, negative E_k for Poisson arrivals.
DerivedParams derive_params(const SimConfig& cfg);

double compute_psi(double d_d_s, double slot_s, double packets_per_slot);
double compute_e_k(double epsilon_k, double lambda, double d_m_s, double slot_s);

}  // namespace aoiv2v
