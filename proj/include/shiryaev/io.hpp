#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "shiryaev/analysis.hpp"
#include "shiryaev/informativeness.hpp"
#include "shiryaev/simulator.hpp"

namespace shiryaev::io {

/// Shortest-safe round-trip form: 17 significant digits, '.' separator.
std::string format_real(double value);

/// Header `k,y,x1,log_x1,log_m`, one row per observation.
std::string trajectory_csv(const Trajectory& trajectory);

/// Header `m,mean_terminal_posterior,std_error,trials,horizon,rho,seed`.
std::string sweep_csv(std::span<const SweepRow> rows);

/// Header `bin_low,bin_high,mean_increment,std_error,count`.
std::string drift_csv(std::span<const DriftEstimate> estimates);

/// {kl, prior_threshold, informative, drift_bound, critical_parameter};
/// critical_parameter is null when the model has none.
nlohmann::json to_json(const InformativenessReport& report);

/// {add, pfa, cost, c, censored}.
nlohmann::json to_json(const DetectionMetrics& metrics);

/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a partial file at `path`. Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace shiryaev::io
