#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "aoiv2v/config.hpp"
#include "aoiv2v/evt.hpp"
#include "aoiv2v/report.hpp"
#include "aoiv2v/simulator.hpp"

namespace fs = std::filesystem;
using namespace aoiv2v;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> slots;
  std::string policy, arrival, rate_model;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file (defaults when omitted)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--slots", o.slots, "number of slots");
  cmd->add_option("--policy", o.policy, "proposed | baseline2 | fixed");
  cmd->add_option("--arrival", o.arrival, "deterministic | poisson");
  cmd->add_option("--rate-model", o.rate_model, "shannon | fbl");
}

SimConfig build_config(const Overrides& o) {
  SimConfig cfg = o.config.empty() ? SimConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.slots) cfg.slots = *o.slots;
  if (!o.policy.empty()) cfg.policy = parse_policy(o.policy);
  if (!o.arrival.empty()) cfg.arrival_model = parse_arrival_model(o.arrival);
  if (!o.rate_model.empty()) cfg.rate_model = parse_rate_model(o.rate_model);
  validate(cfg);
  derive_params(cfg);
  return cfg;
}

void write_outputs(const MetricsReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "summary.json", summary_json(r));
  write_text(dir / "aoi_ccdf.csv", ccdf_csv(r));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-slotted V2V simulator with age-of-information tail control"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_out = "out";
  bool trace = false, clusters = false;
  auto* run_cmd = app.add_subcommand("run", "run one replication");
  add_overrides(run_cmd, run_o);
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_flag("--trace", trace, "also write trace.csv (one row per pair per slot)");
  run_cmd->add_flag("--clusters", clusters, "also write clusters.json");

  Overrides sweep_o;
  std::string sweep_out = "sweep";
  std::string param;
  std::vector<double> values;
  std::uint64_t stride = 0;
  unsigned threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one replication per parameter value");
  add_overrides(sweep_cmd, sweep_o);
  sweep_cmd->add_option("--param", param, "v | arrival_rate | blocklength | block_error | seed")
      ->required();
  sweep_cmd->add_option("--values", values, "parameter values")->required();
  sweep_cmd->add_option("--seed-stride", stride, "seed offset between values");
  sweep_cmd->add_option("--threads", threads, "parallel runs (0: all cores)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  std::string input;
  auto* fit_cmd = app.add_subcommand("fit-gpd", "fit a GPD to a CSV column of excesses");
  fit_cmd->add_option("--input", input, "CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const SimConfig cfg = build_config(run_o);
      fs::create_directories(run_out);
      RunHooks hooks;
      std::unique_ptr<std::ofstream> trace_file;
      if (trace) {
        trace_file = std::make_unique<std::ofstream>(fs::path(run_out) / "trace.csv");
        *trace_file << kTraceHeader << '\n';
        hooks.on_trace = [&](const TraceRow& row) { *trace_file << trace_line(row); };
      }
      std::vector<ClusterEpoch> epochs;
      if (clusters) hooks.on_cluster = [&](const ClusterEpoch& e) { epochs.push_back(e); };
      const MetricsReport r = run(cfg, hooks);
      write_outputs(r, run_out);
      if (clusters) write_text(fs::path(run_out) / "clusters.json", clusters_json(epochs));
      std::cout << summary_json(r);
    } else if (*sweep_cmd) {
      const SimConfig cfg = build_config(sweep_o);
      const SweepParam p = parse_sweep_param(param);
      const auto reports = sweep(cfg, p, values, stride, threads);
      std::cout << to_string(p) << ",avg_aoi_s,worst_aoi_s,avg_power_w,avg_queue_pkts,"
                                   "pr_aoi_exceeds,pr_event\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const Summary& s = reports[i].summary;
        write_outputs(reports[i], fs::path(sweep_out) / ("point_" + std::to_string(i)));
        std::cout << values[i] << ',' << s.avg_aoi_s << ',' << s.worst_aoi_s << ','
                  << s.avg_power_w << ',' << s.avg_queue_pkts << ',' << s.pr_aoi_exceeds << ','
                  << s.pr_event << '\n';
      }
    } else if (*fit_cmd) {
      std::ifstream in(input);
      if (!in) throw std::runtime_error("cannot open " + input);
      const auto xs = read_csv_column(in);
      const GpdFit fit = fit_gpd(xs);
      std::cout << gpd_fit_json(fit, ks_distance(xs, fit.params), xs.size());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
