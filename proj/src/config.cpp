#include "aoiv2v/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace aoiv2v {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const char* field,
                const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ConfigError(field, "unknown value '" + std::string(s) + "'");
}

constexpr std::pair<std::string_view, ArrivalModel> kArrivalNames[] = {
    {"deterministic", ArrivalModel::kDeterministic},
    {"poisson", ArrivalModel::kPoisson}};
constexpr std::pair<std::string_view, RateModel> kRateNames[] = {
    {"shannon", RateModel::kShannon},
    {"fbl", RateModel::kFiniteBlocklength},
    {"finite_blocklength", RateModel::kFiniteBlocklength}};
constexpr std::pair<std::string_view, Policy> kPolicyNames[] = {
    {"proposed", Policy::kProposed},
    {"baseline2", Policy::kBaseline2},
    {"fixed", Policy::kFixedPower},
    {"fixed_power", Policy::kFixedPower}};
constexpr std::pair<std::string_view, InterferenceMode> kInterferenceNames[] = {
    {"exact", InterferenceMode::kExact},
    {"constant", InterferenceMode::kConstant}};
constexpr std::pair<std::string_view, BlockErrorGranularity> kGranularityNames[] = {
    {"slot", BlockErrorGranularity::kPerSlot},
    {"rb", BlockErrorGranularity::kPerRb}};

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected an integer");
  const double d = v.get<double>();
  if (d != std::floor(d)) throw ConfigError(key, "expected an integer");
  return static_cast<std::int64_t>(d);
}

std::string text(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

std::string_view to_string(ArrivalModel m) {
  return m == ArrivalModel::kDeterministic ? "deterministic" : "poisson";
}
std::string_view to_string(RateModel m) {
  return m == RateModel::kShannon ? "shannon" : "fbl";
}
std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kProposed: return "proposed";
    case Policy::kBaseline2: return "baseline2";
    case Policy::kFixedPower: return "fixed";
  }
  return "?";
}
std::string_view to_string(InterferenceMode m) {
  return m == InterferenceMode::kExact ? "exact" : "constant";
}
std::string_view to_string(BlockErrorGranularity g) {
  return g == BlockErrorGranularity::kPerSlot ? "slot" : "rb";
}

ArrivalModel parse_arrival_model(std::string_view s) {
  return parse_enum(s, "arrival_model", kArrivalNames);
}
RateModel parse_rate_model(std::string_view s) {
  return parse_enum(s, "rate_model", kRateNames);
}
Policy parse_policy(std::string_view s) { return parse_enum(s, "policy", kPolicyNames); }
InterferenceMode parse_interference_mode(std::string_view s) {
  return parse_enum(s, "interference_mode", kInterferenceNames);
}
BlockErrorGranularity parse_block_error_granularity(std::string_view s) {
  return parse_enum(s, "block_error_granularity", kGranularityNames);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

void validate(const SimConfig& c) {
  auto require = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(field, msg);
  };
  require(c.num_pairs >= 1, "num_pairs", "must be >= 1");
  require(c.num_rbs >= 1, "num_rbs", "must be >= 1");
  require(c.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(c.slot_s > 0, "slot_s", "must be > 0");
  require(c.p_max_w > 0, "p_max", "must be > 0");
  require(c.packet_bits > 0, "packet_size", "must be > 0");
  require(c.n0_w_per_hz > 0, "n0_dbm_per_hz", "must be a finite power");
  require(c.arrival_rate_bps >= 0, "arrival_rate_bps", "must be >= 0");
  require(c.d_d_s > 0, "d_d_s", "must be > 0");
  require(c.d_m_s > 0, "d_m_s", "must be > 0");
  require(c.epsilon_k > 0 && c.epsilon_k < 1, "epsilon_k", "must lie in (0, 1)");
  require(c.block_error > 0 && c.block_error < 1, "block_error", "must lie in (0, 1)");
  require(c.h_cap > 0, "h_cap", "must be > 0");
  require(c.b_cap > 0, "b_cap", "must be > 0");
  require(c.v >= 0, "v", "must be >= 0");
  require(c.groups >= 2, "groups", "must be >= 2");
  require(c.groups <= c.num_pairs, "groups", "must not exceed num_pairs");
  require(c.gamma_m > 0, "gamma_m", "must be > 0");
  require(c.phi_m > 0, "phi_m", "must be > 0");
  require(c.t0_slots >= 1, "t0_slots", "must be >= 1");
  require(c.alpha > 0, "alpha", "must be > 0");
  require(c.intersection_m >= 0, "intersection_m", "must be >= 0");
  require(c.l0 > 0, "l0_db", "must be a finite gain");
  require(c.l0_prime > 0, "l0_prime_db", "must be a finite gain");
  require(!c.i0_w || *c.i0_w >= 0, "i0_dbm", "must be a finite power");
  require(c.i0_pilot_slots >= 1, "i0_pilot_slots", "must be >= 1");
  require(c.area_side_m > 0, "area_side_m", "must be > 0");
  require(c.block_spacing_m > 0 && c.block_spacing_m <= c.area_side_m, "block_spacing_m",
          "must lie in (0, area_side_m]");
  {
    const double roads = c.area_side_m / c.block_spacing_m;
    require(std::abs(roads - std::round(roads)) < 1e-9, "block_spacing_m",
            "must divide area_side_m");
  }
  require(c.lane_offset_m >= 0 && 2 * c.lane_offset_m < c.block_spacing_m, "lane_offset_m",
          "must be >= 0 and below half the block spacing");
  require(c.pair_distance_m > 0 && c.pair_distance_m < c.block_spacing_m, "pair_distance_m",
          "must lie in (0, block_spacing_m)");
  require(c.speed_kmh >= 0, "speed_kmh", "must be >= 0");
  require(c.slots >= 0, "slots", "must be >= 0");
  require(c.warmup_fraction >= 0 && c.warmup_fraction < 1, "warmup_fraction",
          "must lie in [0, 1)");
  require(!c.blocklength_override || *c.blocklength_override >= 2, "blocklength",
          "must be >= 2");
  require(c.ccp_tolerance > 0, "ccp_tolerance", "must be > 0");
  require(c.ccp_max_iter >= 1, "ccp_max_iter", "must be >= 1");
  if (c.rate_model == RateModel::kFiniteBlocklength) {
    const double L = c.blocklength_override ? static_cast<double>(*c.blocklength_override)
                                            : std::round(c.bandwidth_hz * c.slot_s);
    require(L >= 2, "blocklength", "bandwidth_hz * slot_s must give at least 2 channel uses");
  }
}

SimConfig parse_config(std::string_view text_in) {
  SimConfig c;
  std::string s(text_in);
  if (s.find_first_not_of(" \t\r\n") == std::string::npos) {
    validate(c);
    return c;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(s);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a single JSON object");

  for (const auto& [key, v] : j.items()) {
    if (key == "num_pairs" || key == "k") c.num_pairs = static_cast<int>(integer(v, key));
    else if (key == "num_rbs" || key == "n") c.num_rbs = static_cast<int>(integer(v, key));
    else if (key == "bandwidth_hz") c.bandwidth_hz = number(v, key);
    else if (key == "slot_s") c.slot_s = number(v, key);
    else if (key == "p_max_dbm") c.p_max_w = dbm_to_watts(number(v, key));
    else if (key == "p_max_w") c.p_max_w = number(v, key);
    else if (key == "packet_size_bytes") c.packet_bits = 8.0 * number(v, key);
    else if (key == "packet_size_bits") c.packet_bits = number(v, key);
    else if (key == "n0_dbm_per_hz") c.n0_w_per_hz = dbm_to_watts(number(v, key));
    else if (key == "n0_w_per_hz") c.n0_w_per_hz = number(v, key);
    else if (key == "arrival_rate_bps") c.arrival_rate_bps = number(v, key);
    else if (key == "d_d_s") c.d_d_s = number(v, key);
    else if (key == "d_m_s") c.d_m_s = number(v, key);
    else if (key == "epsilon_k") c.epsilon_k = number(v, key);
    else if (key == "h_cap") c.h_cap = number(v, key);
    else if (key == "b_cap") c.b_cap = number(v, key);
    else if (key == "v") c.v = number(v, key);
    else if (key == "groups") c.groups = static_cast<int>(integer(v, key));
    else if (key == "gamma_m") c.gamma_m = number(v, key);
    else if (key == "phi_m") c.phi_m = number(v, key);
    else if (key == "t0_slots") c.t0_slots = static_cast<int>(integer(v, key));
    else if (key == "alpha") c.alpha = number(v, key);
    else if (key == "intersection_m") c.intersection_m = number(v, key);
    else if (key == "l0_db") c.l0 = db_to_linear(number(v, key));
    else if (key == "l0_prime_db") c.l0_prime = db_to_linear(number(v, key));
    else if (key == "l0") c.l0 = number(v, key);
    else if (key == "l0_prime") c.l0_prime = number(v, key);
    else if (key == "block_error") c.block_error = number(v, key);
    else if (key == "i0_dbm") {
      if (v.is_string() && v.get<std::string>() == "auto") c.i0_w.reset();
      else c.i0_w = dbm_to_watts(number(v, key));
    } else if (key == "i0_w") c.i0_w = number(v, key);
    else if (key == "i0_pilot_slots") c.i0_pilot_slots = static_cast<int>(integer(v, key));
    else if (key == "area_side_m") c.area_side_m = number(v, key);
    else if (key == "block_spacing_m") c.block_spacing_m = number(v, key);
    else if (key == "lane_offset_m") c.lane_offset_m = number(v, key);
    else if (key == "speed_kmh") c.speed_kmh = number(v, key);
    else if (key == "pair_distance_m") c.pair_distance_m = number(v, key);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer(v, key));
    else if (key == "slots") c.slots = integer(v, key);
    else if (key == "warmup_fraction") c.warmup_fraction = number(v, key);
    else if (key == "arrival_model") c.arrival_model = parse_arrival_model(text(v, key));
    else if (key == "rate_model") c.rate_model = parse_rate_model(text(v, key));
    else if (key == "policy") c.policy = parse_policy(text(v, key));
    else if (key == "interference_mode")
      c.interference_mode = parse_interference_mode(text(v, key));
    else if (key == "block_error_granularity")
      c.block_error_granularity = parse_block_error_granularity(text(v, key));
    else if (key == "psi") c.psi_override = number(v, key);
    else if (key == "blocklength") c.blocklength_override = integer(v, key);
    else if (key == "ccp_tolerance") c.ccp_tolerance = number(v, key);
    else if (key == "ccp_max_iter") c.ccp_max_iter = static_cast<int>(integer(v, key));
    else throw ConfigError(key, "unknown key");
  }
  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double compute_psi(double d_d_s, double slot_s, double packets_per_slot) {
  return 2.0 - (d_d_s / slot_s - 1.0) * packets_per_slot;
}

double compute_e_k(double epsilon_k, double lambda, double d_m_s, double slot_s) {
  const double idle = std::exp(-lambda * d_m_s / slot_s);
  return (epsilon_k - idle) / (1.0 - idle);
}

DerivedParams derive_params(const SimConfig& c) {
  DerivedParams d;
  d.packets_per_slot = c.arrival_rate_bps * c.slot_s / c.packet_bits;
  d.lambda = d.packets_per_slot;
  d.psi = c.psi_override ? *c.psi_override
                         : compute_psi(c.d_d_s, c.slot_s, d.packets_per_slot);
  d.blocklength = c.blocklength_override
                      ? *c.blocklength_override
                      : static_cast<std::int64_t>(std::llround(c.bandwidth_hz * c.slot_s));

  if (c.arrival_model == ArrivalModel::kDeterministic) {
    if (d.packets_per_slot / c.slot_s < 1.0 / c.d_d_s) {
      throw ConfigError("arrival_rate_bps",
                        "arrival rate undersamples the age threshold d_d_s (A/tau < 1/d_d)");
    }
    d.e_k = d.lambda > 0 ? compute_e_k(c.epsilon_k, d.lambda, c.d_m_s, c.slot_s) : 0.0;
  } else {
    if (d.lambda <= 0) throw ConfigError("arrival_rate_bps", "must be > 0 for Poisson arrivals");
    const double min_d_m = -c.slot_s * std::log(c.epsilon_k) / d.lambda;
    if (c.d_m_s < min_d_m) {
      throw ConfigError("d_m_s", "must be >= -tau*ln(epsilon_k)/lambda = " +
                                     std::to_string(min_d_m) + " s so that E_k >= 0");
    }
    d.e_k = compute_e_k(c.epsilon_k, d.lambda, c.d_m_s, c.slot_s);
  }
  return d;
}

}  // namespace aoiv2v
