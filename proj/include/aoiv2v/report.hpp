#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "aoiv2v/simulator.hpp"

namespace aoiv2v {

inline constexpr std::string_view kSummarySchema = "aoiv2v.summary/1";
inline constexpr std::string_view kCcdfHeader = "threshold_s,prob";
inline constexpr std::string_view kTraceHeader =
    "slot,pair,tx_x,tx_y,rx_x,rx_y,weight,power_w,service_pkts,queue_pkts,aoi_s,vx,vy,vr,vq,"
    "indicator";

/// Config as a JSON object that parse_config accepts and maps back to the
/// same values.
std::string config_json(const SimConfig& cfg);

/// summary.json contents: schema tag, every Summary field, the excess fit
/// when present, and the config echo. Output is a pure function of the
/// report.
std::string summary_json(const MetricsReport& report);

/// aoi_ccdf.csv contents (thinned survival function of the AoI samples).
std::string ccdf_csv(const MetricsReport& report);

std::string clusters_json(const std::vector<ClusterEpoch>& epochs);
std::string trace_line(const TraceRow& row);

/// Schema checks for emitted files. Each returns an empty list when the
/// document conforms, otherwise one message per problem.
std::vector<std::string> check_summary_json(std::string_view text);
std::vector<std::string> check_ccdf_csv(std::string_view text);
std::vector<std::string> check_trace_csv(std::string_view text);
std::vector<std::string> check_clusters_json(std::string_view text);

/// JSON for the fit-gpd subcommand.
std::string gpd_fit_json(const GpdFit& fit, double ks, std::size_t n);

/// Reads the first numeric column of a CSV; a non-numeric first line is
/// taken as a header. Throws std::runtime_error on malformed rows.
std::vector<double> read_csv_column(std::istream& in);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace aoiv2v
