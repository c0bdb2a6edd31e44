#include <sstream>

#include "aoiv2v/report.hpp"
#include "doctest.h"

using namespace aoiv2v;

namespace {

SimConfig small() {
  SimConfig c;
  c.num_pairs = 4;
  c.num_rbs = 4;
  c.groups = 2;
  c.slots = 800;
  c.i0_pilot_slots = 50;
  c.rate_model = RateModel::kFiniteBlocklength;
  return c;
}

}  // namespace

TEST_CASE("summary and CCDF conform to their schemas") {
  std::vector<ClusterEpoch> epochs;
  std::string trace = std::string(kTraceHeader) + "\n";
  RunHooks hooks;
  hooks.on_cluster = [&](const ClusterEpoch& e) { epochs.push_back(e); };
  hooks.on_trace = [&](const TraceRow& r) { trace += trace_line(r); };
  const auto r = run(small(), hooks);
  const std::string s = summary_json(r);
  CHECK(check_summary_json(s).empty());
  CHECK(check_ccdf_csv(ccdf_csv(r)).empty());
  CHECK(check_trace_csv(trace).empty());
  CHECK(check_clusters_json(clusters_json(epochs)).empty());
  CHECK(epochs.size() == 8);
}

TEST_CASE("schema checks reject broken documents") {
  const auto r = run(small());
  std::string s = summary_json(r);
  CHECK_FALSE(check_summary_json("{}").empty());
  CHECK_FALSE(check_summary_json("not json").empty());
  const auto pos = s.find("\"pr_event\"");
  std::string broken = s;
  broken.replace(pos, 10, "\"pr_evnt\"");
  CHECK_FALSE(check_summary_json(broken).empty());
  CHECK_FALSE(check_ccdf_csv("x,y\n1,0.5\n").empty());
  CHECK_FALSE(check_ccdf_csv("threshold_s,prob\n1,0.5\n2,0.7\n").empty());
  CHECK_FALSE(check_ccdf_csv("threshold_s,prob\n1,1.5\n").empty());
  CHECK_FALSE(check_trace_csv(std::string(kTraceHeader) + "\n1,2,3\n").empty());
}

TEST_CASE("config echo round-trips through the parser") {
  SimConfig c = small();
  c.psi_override = -3.25;
  c.i0_w = 1e-13;
  c.v = 0.125;
  const SimConfig back = parse_config(config_json(c));
  CHECK(config_json(back) == config_json(c));
  CHECK(back.l0 == c.l0);
  CHECK(back.p_max_w == c.p_max_w);
}

TEST_CASE("CSV column reader") {
  std::istringstream in("excess\n0.5\n1.25,extra\n\n2\n");
  CHECK(read_csv_column(in) == std::vector<double>{0.5, 1.25, 2.0});
  std::istringstream bad("1\nabc\n");
  CHECK_THROWS_AS(read_csv_column(bad), std::runtime_error);
}
