#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiryaev/filter.hpp"
#include "shiryaev/simulator.hpp"
#include "shiryaev/stats.hpp"

namespace shiryaev {

// ---------------------------------------------------------------------------
// Conditional drift of log x1.

/// Log-spaced bins on the conditioning posterior x1_{n}: one catch-all bin
/// [0, lowest) and `per_decade` bins per decade from `lowest` up to 1.
struct DriftBinning {
  double lowest = 1e-6;
  int per_decade = 12;

  /// Throws std::invalid_argument unless 0 < lowest < 1 and per_decade >= 1.
  void validate() const;
  std::size_t bin_count() const;
  /// Bin holding a posterior with the given log value (may be -inf).
  std::size_t bin_of(double log_x1) const;
  double lower_edge(std::size_t bin) const;
  double upper_edge(std::size_t bin) const;
};

/// Which steps feed the drift estimate.
enum class DriftConditioning {
  pre_change_only,  // steps whose new observation is still pre-change
  all_steps,        // every step, pre- and post-change alike
};

inline constexpr std::uint64_t kDefaultMinCellSize = 100;

/// Empirical E[log x1_{n+1} - log x1_n | x1_n in [bin_low, bin_high)].
struct DriftEstimate {
  double bin_low = 0.0;
  double bin_high = 0.0;
  double mean_increment = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  bool reliable = false;  // count >= minimum cell size
};

class DriftAccumulator {
 public:
  explicit DriftAccumulator(DriftBinning binning = {});

  /// Records one increment log M_{n+1} conditioned on log x1_n.
  void add(double log_x1_before, double log_m);
  /// Exact merge; merge in a fixed order for bitwise-reproducible output.
  void merge(const DriftAccumulator& other);

  const DriftBinning& binning() const { return binning_; }
  /// Empty bins are included with count 0 and NaN mean.
  std::vector<DriftEstimate> estimates(std::uint64_t min_cell_size = kDefaultMinCellSize) const;

 private:
  DriftBinning binning_;
  std::vector<RunningStats> cells_;
};

std::vector<DriftEstimate> estimate_drift(std::span<const Trajectory> trajectories,
                                          const DriftBinning& binning = {},
                                          DriftConditioning conditioning =
                                              DriftConditioning::pre_change_only,
                                          std::uint64_t min_cell_size = kDefaultMinCellSize);

/// Lowest-posterior bin with count >= min cell size.
std::optional<DriftEstimate> smallest_reliable_bin(std::span<const DriftEstimate> estimates);

/// Combines every bin whose upper edge is <= `upper` into one estimate
/// (exact pooled mean and variance). Reliability uses `min_cell_size`.
DriftEstimate pool_drift(std::span<const DriftEstimate> estimates, double upper,
                         std::uint64_t min_cell_size = kDefaultMinCellSize);

/// Empirical trap level: walking up from the smallest reliable bin, the
/// upper edge of the last bin in the unbroken run of reliable bins whose
/// drift is below zero by more than `z` standard errors. Empty if the
/// smallest reliable bin is not significantly negative.
std::optional<double> empirical_trap_level(std::span<const DriftEstimate> estimates,
                                           double z = 3.0);

// ---------------------------------------------------------------------------
// Trap entry / escape.

struct TrapLevels {
  double entry = 1e-3;
  double escape = 1e-1;

  /// Throws std::invalid_argument unless 0 < entry < escape <= 1.
  void validate() const;
};

/// Per-trajectory tracker over the pre-change part of one path.
class TrapTracker {
 public:
  explicit TrapTracker(TrapLevels levels);
  void observe(double log_x1);
  bool entered() const { return entered_; }
  bool escaped() const { return escaped_; }

 private:
  double log_entry_;
  double log_escape_;
  bool entered_ = false;
  bool escaped_ = false;
};

struct TrapStatistics {
  std::int64_t trajectories = 0;
  std::int64_t entered = 0;
  std::int64_t escaped = 0;  // among those that entered

  double entry_fraction() const;
  /// NaN when no trajectory entered.
  double escape_fraction() const;
};

TrapStatistics trap_statistics(std::span<const Trajectory> trajectories, TrapLevels levels);

// ---------------------------------------------------------------------------
// Detection metrics.

struct DetectionMetrics {
  double add = 0.0;   // E[(tau - nu)^+] over trials that stopped
  double pfa = 0.0;   // fraction with tau < nu
  double cost = 0.0;  // c * add + pfa
  double c = 0.0;
  std::int64_t trials = 0;
  std::int64_t censored = 0;  // never stopped within the horizon

  /// Names the censored count; empty when nothing was censored.
  std::string warning() const;
};

/// Trials that never stop get tau = horizon + 1: excluded from `add`,
/// counted in `censored`, and compared against nu for `pfa`.
DetectionMetrics detection_metrics(std::span<const TrialSummary> trials, std::int64_t horizon,
                                   double c);
DetectionMetrics detection_metrics(std::span<const Trajectory> trajectories, double c);

// ---------------------------------------------------------------------------
// Streaming batch analysis (no stored paths).

struct AnalysisOptions {
  DriftBinning binning;
  DriftConditioning conditioning = DriftConditioning::pre_change_only;
  std::optional<TrapLevels> trap;
  std::uint64_t min_cell_size = kDefaultMinCellSize;
};

struct BatchAnalysis {
  std::vector<TrialSummary> trials;
  std::vector<DriftEstimate> drift;
  std::optional<TrapStatistics> trap;
};

/// Runs every trial of `config` and accumulates drift and trap statistics
/// per trial, then merges them in trial order. Output is identical for
/// serial and parallel execution.
BatchAnalysis analyse_batch(const ObservationModel& model, const GeometricPrior& prior,
                            const MonteCarloConfig& config, const StoppingRule* rule,
                            const AnalysisOptions& options,
                            Execution execution = Execution::parallel);

struct DetectionStudy {
  DetectionMetrics metrics;
  /// Mean of x1 at the alarm over stopped trials; equals P(tau < nu) in
  /// expectation, with lower variance than the raw frequency.
  double mean_posterior_at_alarm = 0.0;
};

/// Batch under the prior with the stopping rule applied. Throws
/// std::invalid_argument unless config.change_mode is sample_from_prior.
DetectionStudy run_detection_study(const ObservationModel& model, const GeometricPrior& prior,
                                   const MonteCarloConfig& config, const StoppingRule& rule,
                                   double c, Execution execution = Execution::parallel);

}  // namespace shiryaev
