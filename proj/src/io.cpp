#include "shiryaev/io.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace shiryaev::io {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "k,y,x1,log_x1,log_m\n";
  auto it = std::back_inserter(out);
  for (std::size_t i = 0; i < t.size(); ++i) {
    fmt::format_to(it, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i + 1, t.observations[i], t.x1[i],
                   t.log_x1[i], t.log_m[i]);
  }
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "m,mean_terminal_posterior,std_error,trials,horizon,rho,seed\n";
  auto it = std::back_inserter(out);
  for (const auto& r : rows) {
    fmt::format_to(it, "{:.17g},{:.17g},{:.17g},{},{},{:.17g},{}\n", r.m,
                   r.mean_terminal_posterior, r.std_error, r.trials, r.horizon, r.rho, r.seed);
  }
  return out;
}

std::string drift_csv(std::span<const DriftEstimate> estimates) {
  std::string out = "bin_low,bin_high,mean_increment,std_error,count\n";
  auto it = std::back_inserter(out);
  for (const auto& e : estimates) {
    fmt::format_to(it, "{:.17g},{:.17g},{:.17g},{:.17g},{}\n", e.bin_low, e.bin_high,
                   e.mean_increment, e.std_error, e.count);
  }
  return out;
}

nlohmann::json to_json(const InformativenessReport& report) {
  nlohmann::json j;
  j["kl"] = report.kl;
  j["prior_threshold"] = report.prior_threshold;
  j["informative"] = report.informative;
  j["drift_bound"] = report.drift_bound;
  j["critical_parameter"] = report.critical_parameter
                                ? nlohmann::json(*report.critical_parameter)
                                : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const DetectionMetrics& metrics) {
  return {{"add", metrics.add},
          {"pfa", metrics.pfa},
          {"cost", metrics.cost},
          {"c", metrics.c},
          {"censored", metrics.censored}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error(fmt::format("cannot open {} for writing", tmp.string()));
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error(fmt::format("failed writing {}", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error(fmt::format("cannot move output into place at {}", path.string()));
  }
}

}  // namespace shiryaev::io
