#include "aoiv2v/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace aoiv2v {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json config_object(const SimConfig& c) {
  ordered_json j;
  j["num_pairs"] = c.num_pairs;
  j["num_rbs"] = c.num_rbs;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["slot_s"] = c.slot_s;
  j["p_max_w"] = c.p_max_w;
  j["packet_size_bits"] = c.packet_bits;
  j["n0_w_per_hz"] = c.n0_w_per_hz;
  j["arrival_rate_bps"] = c.arrival_rate_bps;
  j["d_d_s"] = c.d_d_s;
  j["d_m_s"] = c.d_m_s;
  j["epsilon_k"] = c.epsilon_k;
  j["h_cap"] = c.h_cap;
  j["b_cap"] = c.b_cap;
  j["v"] = c.v;
  j["groups"] = c.groups;
  j["gamma_m"] = c.gamma_m;
  j["phi_m"] = c.phi_m;
  j["t0_slots"] = c.t0_slots;
  j["alpha"] = c.alpha;
  j["intersection_m"] = c.intersection_m;
  j["l0"] = c.l0;
  j["l0_prime"] = c.l0_prime;
  j["block_error"] = c.block_error;
  if (c.i0_w) j["i0_w"] = *c.i0_w;
  else j["i0_dbm"] = "auto";
  j["i0_pilot_slots"] = c.i0_pilot_slots;
  j["area_side_m"] = c.area_side_m;
  j["block_spacing_m"] = c.block_spacing_m;
  j["lane_offset_m"] = c.lane_offset_m;
  j["speed_kmh"] = c.speed_kmh;
  j["pair_distance_m"] = c.pair_distance_m;
  j["seed"] = c.seed;
  j["slots"] = c.slots;
  j["warmup_fraction"] = c.warmup_fraction;
  j["arrival_model"] = std::string(to_string(c.arrival_model));
  j["rate_model"] = std::string(to_string(c.rate_model));
  j["policy"] = std::string(to_string(c.policy));
  j["interference_mode"] = std::string(to_string(c.interference_mode));
  j["block_error_granularity"] = std::string(to_string(c.block_error_granularity));
  if (c.psi_override) j["psi"] = *c.psi_override;
  if (c.blocklength_override) j["blocklength"] = *c.blocklength_override;
  j["ccp_tolerance"] = c.ccp_tolerance;
  j["ccp_max_iter"] = c.ccp_max_iter;
  return j;
}

struct FieldSpec {
  const char* name;
  enum Kind { kNumber, kInteger, kProbability, kNonNegative } kind;
};

constexpr FieldSpec kSummaryFields[] = {
    {"slots", FieldSpec::kInteger},
    {"warmup_slots", FieldSpec::kInteger},
    {"samples", FieldSpec::kInteger},
    {"age_threshold_s", FieldSpec::kNonNegative},
    {"avg_aoi_s", FieldSpec::kNonNegative},
    {"median_aoi_s", FieldSpec::kNonNegative},
    {"worst_aoi_s", FieldSpec::kNonNegative},
    {"avg_power_w", FieldSpec::kNonNegative},
    {"avg_queue_pkts", FieldSpec::kNonNegative},
    {"avg_service_pkts", FieldSpec::kNonNegative},
    {"pr_aoi_exceeds", FieldSpec::kProbability},
    {"pr_event", FieldSpec::kProbability},
    {"aoi_bound", FieldSpec::kProbability},
    {"event_count", FieldSpec::kInteger},
    {"mean_excess", FieldSpec::kNonNegative},
    {"mean_excess_sq", FieldSpec::kNonNegative},
    {"budget_violations", FieldSpec::kInteger},
    {"mean_interference_w", FieldSpec::kNonNegative},
    {"i0_w", FieldSpec::kNonNegative},
    {"psi", FieldSpec::kNumber},
    {"e_k", FieldSpec::kNumber},
    {"blocklength", FieldSpec::kInteger},
    {"packets_per_slot", FieldSpec::kNonNegative},
};

void check_field(const json& obj, const FieldSpec& f, std::vector<std::string>& errs) {
  if (!obj.contains(f.name)) {
    errs.push_back(std::string("missing field ") + f.name);
    return;
  }
  const json& v = obj.at(f.name);
  if (!v.is_number()) {
    errs.push_back(std::string(f.name) + " is not a number");
    return;
  }
  const double x = v.get<double>();
  switch (f.kind) {
    case FieldSpec::kInteger:
      if (!v.is_number_integer()) errs.push_back(std::string(f.name) + " is not an integer");
      break;
    case FieldSpec::kProbability:
      if (!(x >= 0.0 && x <= 1.0)) errs.push_back(std::string(f.name) + " outside [0, 1]");
      break;
    case FieldSpec::kNonNegative:
      if (!(x >= 0.0)) errs.push_back(std::string(f.name) + " is negative");
      break;
    case FieldSpec::kNumber:
      break;
  }
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string fmt(double x) {
  // Shortest round-trip representation.
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string config_json(const SimConfig& cfg) { return config_object(cfg).dump(2); }

std::string summary_json(const MetricsReport& report) {
  const Summary& s = report.summary;
  ordered_json j;
  j["schema"] = std::string(kSummarySchema);
  j["slots"] = s.slots;
  j["warmup_slots"] = s.warmup_slots;
  j["samples"] = s.samples;
  j["age_threshold_s"] = s.age_threshold_s;
  j["avg_aoi_s"] = s.avg_aoi_s;
  j["median_aoi_s"] = s.median_aoi_s;
  j["worst_aoi_s"] = s.worst_aoi_s;
  j["avg_power_w"] = s.avg_power_w;
  j["avg_queue_pkts"] = s.avg_queue_pkts;
  j["avg_service_pkts"] = s.avg_service_pkts;
  j["pr_aoi_exceeds"] = s.pr_aoi_exceeds;
  j["pr_event"] = s.pr_event;
  j["aoi_bound"] = std::min(1.0, s.aoi_bound);
  j["event_count"] = s.event_count;
  j["mean_excess"] = s.mean_excess;
  j["mean_excess_sq"] = s.mean_excess_sq;
  j["budget_violations"] = s.budget_violations;
  j["mean_interference_w"] = s.mean_interference_w;
  j["i0_w"] = s.i0_w;
  j["psi"] = s.psi;
  j["e_k"] = s.e_k;
  j["blocklength"] = s.blocklength;
  j["packets_per_slot"] = s.packets_per_slot;
  if (report.excess_fit) {
    ordered_json fit;
    fit["sigma"] = report.excess_fit->params.sigma;
    fit["xi"] = report.excess_fit->params.xi;
    fit["loglik"] = report.excess_fit->log_likelihood;
    fit["ks"] = report.excess_ks.value_or(0.0);
    fit["n"] = report.excess_samples.size();
    j["excess_fit"] = fit;
  } else {
    j["excess_fit"] = nullptr;
  }
  j["config"] = config_object(report.config);
  return j.dump(2) + "\n";
}

std::string ccdf_csv(const MetricsReport& report) {
  std::string out(kCcdfHeader);
  out += '\n';
  if (report.aoi_samples.empty()) return out;
  for (const auto& [x, p] : thin_ccdf(ccdf(report.aoi_samples))) {
    out += fmt(x) + ',' + fmt(p) + '\n';
  }
  return out;
}

std::string clusters_json(const std::vector<ClusterEpoch>& epochs) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : epochs) {
    ordered_json o;
    o["slot"] = e.slot;
    o["labels"] = e.labels;
    o["rbs"] = e.rbs;
    arr.push_back(o);
  }
  return arr.dump() + "\n";
}

std::string trace_line(const TraceRow& r) {
  std::string s = std::to_string(r.slot) + ',' + std::to_string(r.pair);
  for (double x : {r.tx_x, r.tx_y, r.rx_x, r.rx_y, r.weight, r.power_w, r.service_pkts,
                   r.queue_pkts, r.aoi_s, r.vx, r.vy, r.vr, r.vq}) {
    s += ',' + fmt(x);
  }
  s += r.indicator ? ",1\n" : ",0\n";
  return s;
}

std::vector<std::string> check_summary_json(std::string_view text) {
  std::vector<std::string> errs;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  if (!j.is_object()) return {"top level is not an object"};
  if (!j.contains("schema") || j["schema"] != std::string(kSummarySchema)) {
    errs.push_back("schema tag missing or unknown");
  }
  for (const auto& f : kSummaryFields) check_field(j, f, errs);
  if (errs.empty()) {
    if (j["worst_aoi_s"].get<double>() < j["avg_aoi_s"].get<double>()) {
      errs.push_back("worst_aoi_s below avg_aoi_s");
    }
    if (j["samples"].get<std::int64_t>() < 0) errs.push_back("samples is negative");
  }
  if (!j.contains("excess_fit")) {
    errs.push_back("missing field excess_fit");
  } else if (!j["excess_fit"].is_null()) {
    const json& fit = j["excess_fit"];
    for (const char* k : {"sigma", "xi", "loglik", "ks", "n"}) {
      if (!fit.contains(k) || !fit[k].is_number()) errs.push_back(std::string("excess_fit.") + k);
    }
  }
  if (!j.contains("config") || !j["config"].is_object()) {
    errs.push_back("missing config object");
  } else {
    try {
      parse_config(j["config"].dump());
    } catch (const std::exception& e) {
      errs.push_back(std::string("config echo rejected: ") + e.what());
    }
  }
  return errs;
}

std::vector<std::string> check_ccdf_csv(std::string_view text) {
  std::vector<std::string> errs;
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kCcdfHeader) return {"bad or missing header"};
  double prev_x = -1.0, prev_p = 2.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    double x = 0, p = 0;
    if (cols.size() != 2 || !parse_double(cols[0], x) || !parse_double(cols[1], p)) {
      errs.push_back("line " + std::to_string(i + 1) + ": malformed");
      continue;
    }
    if (p < 0 || p > 1) errs.push_back("line " + std::to_string(i + 1) + ": prob outside [0, 1]");
    if (x <= prev_x) errs.push_back("line " + std::to_string(i + 1) + ": thresholds not increasing");
    if (p > prev_p) errs.push_back("line " + std::to_string(i + 1) + ": prob increases");
    prev_x = x;
    prev_p = p;
  }
  return errs;
}

std::vector<std::string> check_trace_csv(std::string_view text) {
  std::vector<std::string> errs;
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTraceHeader) return {"bad or missing header"};
  const std::size_t width = split(kTraceHeader, ',').size();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    bool ok = cols.size() == width;
    for (std::size_t c = 0; ok && c < cols.size(); ++c) {
      double x = 0;
      ok = parse_double(cols[c], x);
      if (ok && c + 1 == width) ok = x == 0.0 || x == 1.0;
    }
    if (!ok) errs.push_back("line " + std::to_string(i + 1) + ": malformed");
  }
  return errs;
}

std::vector<std::string> check_clusters_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  if (!j.is_array()) return {"top level is not an array"};
  std::vector<std::string> errs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const bool ok = e.is_object() && e.contains("slot") && e["slot"].is_number_integer() &&
                    e.contains("labels") && e["labels"].is_array() && e.contains("rbs") &&
                    e["rbs"].is_array() && e["labels"].size() == e["rbs"].size();
    if (!ok) errs.push_back("epoch " + std::to_string(i) + ": malformed");
  }
  return errs;
}

std::string gpd_fit_json(const GpdFit& fit, double ks, std::size_t n) {
  ordered_json j;
  j["sigma"] = fit.params.sigma;
  j["xi"] = fit.params.xi;
  j["loglik"] = fit.log_likelihood;
  j["ks"] = ks;
  j["n"] = n;
  return j.dump(2) + "\n";
}

std::vector<double> read_csv_column(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cell = split(line, ',').front();
    double x = 0;
    if (!parse_double(cell, x)) {
      if (lineno == 1) continue;
      throw std::runtime_error("line " + std::to_string(lineno) + ": not a number");
    }
    out.push_back(x);
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace aoiv2v
