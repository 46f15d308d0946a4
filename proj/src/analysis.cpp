#include "shiryaev/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace shiryaev {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------------------

void DriftBinning::validate() const {
  if (!(lowest > 0.0 && lowest < 1.0)) {
    throw std::invalid_argument(fmt::format("drift binning lowest edge must lie in (0, 1), got {}",
                                            lowest));
  }
  if (per_decade < 1) {
    throw std::invalid_argument(fmt::format("bins per decade must be >= 1, got {}", per_decade));
  }
}

std::size_t DriftBinning::bin_count() const {
  const double decades = -std::log10(lowest);
  return 1 + static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9));
}

std::size_t DriftBinning::bin_of(double log_x1) const {
  const double log10_x = log_x1 / std::log(10.0);
  const double log10_lo = std::log10(lowest);
  if (!(log10_x >= log10_lo)) return 0;
  const auto i = 1 + static_cast<std::size_t>(std::floor((log10_x - log10_lo) * per_decade));
  return std::min(i, bin_count() - 1);
}

double DriftBinning::lower_edge(std::size_t bin) const {
  if (bin == 0) return 0.0;
  return std::pow(10.0, std::log10(lowest) + static_cast<double>(bin - 1) / per_decade);
}

double DriftBinning::upper_edge(std::size_t bin) const {
  if (bin + 1 >= bin_count()) return 1.0;
  return std::pow(10.0, std::log10(lowest) + static_cast<double>(bin) / per_decade);
}

DriftAccumulator::DriftAccumulator(DriftBinning binning) : binning_(binning) {
  binning_.validate();
  cells_.resize(binning_.bin_count());
}

void DriftAccumulator::add(double log_x1_before, double log_m) {
  if (!std::isfinite(log_m) || std::isnan(log_x1_before)) return;
  cells_[binning_.bin_of(log_x1_before)].add(log_m);
}

void DriftAccumulator::merge(const DriftAccumulator& other) {
  if (other.binning_.lowest != binning_.lowest || other.binning_.per_decade != binning_.per_decade) {
    throw std::invalid_argument("cannot merge drift accumulators with different binnings");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].merge(other.cells_[i]);
}

std::vector<DriftEstimate> DriftAccumulator::estimates(std::uint64_t min_cell_size) const {
  std::vector<DriftEstimate> out;
  out.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const RunningStats& cell = cells_[i];
    DriftEstimate e;
    e.bin_low = binning_.lower_edge(i);
    e.bin_high = binning_.upper_edge(i);
    e.count = cell.count();
    e.mean_increment = cell.count() ? cell.mean() : kNaN;
    e.std_error = cell.count() ? cell.std_error() : kNaN;
    e.reliable = cell.count() > 0 && cell.count() >= min_cell_size;
    out.push_back(e);
  }
  return out;
}

namespace {

bool counts(DriftConditioning conditioning, Regime regime) {
  return conditioning == DriftConditioning::all_steps || regime == Regime::pre;
}

}  // namespace

std::vector<DriftEstimate> estimate_drift(std::span<const Trajectory> trajectories,
                                          const DriftBinning& binning,
                                          DriftConditioning conditioning,
                                          std::uint64_t min_cell_size) {
  DriftAccumulator acc(binning);
  for (const Trajectory& t : trajectories) {
    double log_before = 0.0;  // x1_0 = 1
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto k = static_cast<std::int64_t>(i) + 1;
      const Regime regime = k < t.nu ? Regime::pre : Regime::post;
      if (counts(conditioning, regime)) acc.add(log_before, t.log_m[i]);
      log_before = t.log_x1[i];
    }
  }
  return acc.estimates(min_cell_size);
}

std::optional<DriftEstimate> smallest_reliable_bin(std::span<const DriftEstimate> estimates) {
  for (const auto& e : estimates) {
    if (e.reliable) return e;
  }
  return std::nullopt;
}

DriftEstimate pool_drift(std::span<const DriftEstimate> estimates, double upper,
                         std::uint64_t min_cell_size) {
  DriftEstimate pooled;
  pooled.bin_low = 0.0;
  pooled.bin_high = 0.0;
  double sum = 0.0;
  for (const auto& e : estimates) {
    if (e.bin_high > upper * (1.0 + 1e-12) || e.count == 0) continue;
    pooled.bin_high = std::max(pooled.bin_high, e.bin_high);
    pooled.count += e.count;
    sum += static_cast<double>(e.count) * e.mean_increment;
  }
  if (pooled.count == 0) {
    pooled.mean_increment = kNaN;
    pooled.std_error = kNaN;
    return pooled;
  }
  const auto n = static_cast<double>(pooled.count);
  pooled.mean_increment = sum / n;
  // Within-bin M2 recovered from each bin's standard error, plus between-bin spread.
  double m2 = 0.0;
  for (const auto& e : estimates) {
    if (e.bin_high > upper * (1.0 + 1e-12) || e.count == 0) continue;
    const auto n_i = static_cast<double>(e.count);
    const double var_i = e.count > 1 ? e.std_error * e.std_error * n_i : 0.0;
    const double d = e.mean_increment - pooled.mean_increment;
    m2 += (n_i - 1.0) * var_i + n_i * d * d;
  }
  pooled.std_error = pooled.count > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  pooled.reliable = pooled.count >= min_cell_size;
  return pooled;
}

std::optional<double> empirical_trap_level(std::span<const DriftEstimate> estimates, double z) {
  std::optional<double> level;
  bool started = false;
  for (const auto& e : estimates) {
    if (!e.reliable) {
      if (started) break;
      continue;
    }
    started = true;
    if (!(e.mean_increment + z * e.std_error < 0.0)) break;
    level = e.bin_high;
  }
  return level;
}

// ---------------------------------------------------------------------------

void TrapLevels::validate() const {
  if (!(entry > 0.0 && entry <= 1.0)) {
    throw std::invalid_argument(fmt::format("trap entry level must lie in (0, 1], got {}", entry));
  }
  if (!(escape > entry && escape <= 1.0)) {
    throw std::invalid_argument(fmt::format(
        "trap escape level must lie in (entry, 1] = ({}, 1], got {}", entry, escape));
  }
}

TrapTracker::TrapTracker(TrapLevels levels)
    : log_entry_(std::log(levels.entry)), log_escape_(std::log(levels.escape)) {
  levels.validate();
}

void TrapTracker::observe(double log_x1) {
  if (!entered_) {
    entered_ = log_x1 < log_entry_;
  } else if (!escaped_) {
    escaped_ = log_x1 > log_escape_;
  }
}

double TrapStatistics::entry_fraction() const {
  return trajectories ? static_cast<double>(entered) / static_cast<double>(trajectories) : kNaN;
}

double TrapStatistics::escape_fraction() const {
  return entered ? static_cast<double>(escaped) / static_cast<double>(entered) : kNaN;
}

TrapStatistics trap_statistics(std::span<const Trajectory> trajectories, TrapLevels levels) {
  levels.validate();
  TrapStatistics stats;
  for (const Trajectory& t : trajectories) {
    TrapTracker tracker(levels);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<std::int64_t>(i) + 1 >= t.nu) break;
      tracker.observe(t.log_x1[i]);
    }
    ++stats.trajectories;
    stats.entered += tracker.entered();
    stats.escaped += tracker.escaped();
  }
  return stats;
}

// ---------------------------------------------------------------------------

std::string DetectionMetrics::warning() const {
  if (censored == 0) return {};
  return fmt::format(
      "{} of {} trajectories never stopped within the horizon; they are excluded from the "
      "average detection delay, which is biased low",
      censored, trials);
}

DetectionMetrics detection_metrics(std::span<const TrialSummary> trials, std::int64_t horizon,
                                   double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument(fmt::format("delay penalty c must be finite and >= 0, got {}", c));
  }
  if (trials.empty()) throw std::invalid_argument("detection_metrics needs at least one trial");

  DetectionMetrics m;
  m.c = c;
  m.trials = static_cast<std::int64_t>(trials.size());
  std::int64_t false_alarms = 0;
  double delay_sum = 0.0;
  std::int64_t stopped = 0;
  for (const TrialSummary& t : trials) {
    const std::int64_t tau = t.stop_time.value_or(horizon + 1);
    if (tau < t.nu) ++false_alarms;
    if (!t.stop_time) {
      ++m.censored;
      continue;
    }
    ++stopped;
    if (t.has_change()) delay_sum += static_cast<double>(std::max<std::int64_t>(0, tau - t.nu));
  }
  m.add = stopped ? delay_sum / static_cast<double>(stopped) : 0.0;
  m.pfa = static_cast<double>(false_alarms) / static_cast<double>(m.trials);
  m.cost = c * m.add + m.pfa;
  return m;
}

DetectionMetrics detection_metrics(std::span<const Trajectory> trajectories, double c) {
  std::vector<TrialSummary> summaries;
  summaries.reserve(trajectories.size());
  std::int64_t horizon = 0;
  for (const Trajectory& t : trajectories) {
    summaries.push_back(t.summary());
    horizon = std::max(horizon, static_cast<std::int64_t>(t.size()));
  }
  return detection_metrics(summaries, horizon, c);
}

// ---------------------------------------------------------------------------

namespace {

struct TrialAnalysis {
  TrialSummary summary;
  std::optional<DriftAccumulator> drift;
  bool entered = false;
  bool escaped = false;
};

}  // namespace

BatchAnalysis analyse_batch(const ObservationModel& model, const GeometricPrior& prior,
                            const MonteCarloConfig& config, const StoppingRule* rule,
                            const AnalysisOptions& options, Execution execution) {
  config.validate();
  options.binning.validate();
  if (options.trap) options.trap->validate();

  auto per_trial = for_each_trial(config.trials, execution, [&](std::int64_t i) {
    TrialAnalysis out;
    out.drift.emplace(options.binning);
    std::optional<TrapTracker> tracker;
    if (options.trap) tracker.emplace(*options.trap);
    out.summary = simulate_trial(
        model, prior, config, rule, i,
        [&](double, Regime regime, const FilterState& before, const FilterState& after) {
          if (counts(options.conditioning, regime)) out.drift->add(before.log_x1, after.last_log_m);
          if (tracker && regime == Regime::pre) tracker->observe(after.log_x1);
        });
    if (tracker) {
      out.entered = tracker->entered();
      out.escaped = tracker->escaped();
    }
    return out;
  });

  BatchAnalysis result;
  result.trials.reserve(per_trial.size());
  DriftAccumulator drift(options.binning);
  TrapStatistics trap;
  for (auto& t : per_trial) {  // trial order
    result.trials.push_back(t.summary);
    drift.merge(*t.drift);
    ++trap.trajectories;
    trap.entered += t.entered;
    trap.escaped += t.escaped;
  }
  result.drift = drift.estimates(options.min_cell_size);
  if (options.trap) result.trap = trap;
  return result;
}

DetectionStudy run_detection_study(const ObservationModel& model, const GeometricPrior& prior,
                                   const MonteCarloConfig& config, const StoppingRule& rule,
                                   double c, Execution execution) {
  if (config.change_mode.kind() != ChangeMode::Kind::sample_from_prior) {
    throw std::invalid_argument("detection metrics require change times drawn from the prior");
  }
  const auto trials = run_batch(model, prior, config, &rule, execution);
  DetectionStudy study;
  study.metrics = detection_metrics(trials, config.horizon, c);
  RunningStats at_alarm;
  for (const auto& t : trials) {
    if (t.stop_time) at_alarm.add(t.x1_at_stop);
  }
  study.mean_posterior_at_alarm = at_alarm.count() ? at_alarm.mean() : kNaN;
  return study;
}

}  // namespace shiryaev
