#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "shiryaev/filter.hpp"
#include "shiryaev/observation_models.hpp"
#include "shiryaev/parallel.hpp"
#include "shiryaev/random.hpp"

namespace shiryaev {

/// Change time marker for runs in which the change never happens.
inline constexpr std::int64_t kNeverChanges = std::numeric_limits<std::int64_t>::max();

class ChangeMode {
 public:
  enum class Kind { sample_from_prior, fixed_nu, no_change };

  static ChangeMode sample_from_prior() { return ChangeMode(Kind::sample_from_prior, 0); }
  /// Change effective at observation nu (1-indexed); throws unless nu >= 1.
  static ChangeMode fixed(std::int64_t nu);
  static ChangeMode no_change() { return ChangeMode(Kind::no_change, kNeverChanges); }

  Kind kind() const { return kind_; }
  std::int64_t nu() const { return nu_; }

  friend bool operator==(const ChangeMode&, const ChangeMode&) = default;

 private:
  ChangeMode(Kind kind, std::int64_t nu) : kind_(kind), nu_(nu) {}
  Kind kind_;
  std::int64_t nu_;
};

struct MonteCarloConfig {
  std::int64_t trials = 1000;
  std::int64_t horizon = 5000;
  std::uint64_t seed = 2019;
  ChangeMode change_mode = ChangeMode::no_change();

  /// Throws std::invalid_argument unless trials >= 1 and horizon >= 1.
  void validate() const;
};

/// Geometric draw on {1, 2, ...} with P(nu = k) = (1 - rho)^(k-1) rho.
std::int64_t sample_change_time(const GeometricPrior& prior, RandomStream& rng);

/// The random stream owned by one trial of a batch.
inline RandomStream trial_stream(const MonteCarloConfig& config, std::int64_t trial_index) {
  return RandomStream(config.seed, static_cast<std::uint64_t>(trial_index));
}

struct TrialSummary {
  std::int64_t nu = kNeverChanges;
  std::optional<std::int64_t> stop_time;
  double x1_at_stop = std::numeric_limits<double>::quiet_NaN();
  FilterState terminal;

  bool has_change() const { return nu != kNeverChanges; }
};

/// Core per-trial loop. Draws the change time (if sampled), then for
/// k = 1..horizon draws y_k from b1 when k < nu and b2 otherwise, steps the
/// filter, and calls on_step(y, regime, before, after). Records the first alarm of
/// `rule` when one is given.
template <class OnStep>
TrialSummary simulate_trial(const ObservationModel& model, const GeometricPrior& prior,
                            const MonteCarloConfig& config, const StoppingRule* rule,
                            std::int64_t trial_index, OnStep&& on_step) {
  RandomStream rng = trial_stream(config, trial_index);
  TrialSummary out;
  switch (config.change_mode.kind()) {
    case ChangeMode::Kind::sample_from_prior: out.nu = sample_change_time(prior, rng); break;
    case ChangeMode::Kind::fixed_nu: out.nu = config.change_mode.nu(); break;
    case ChangeMode::Kind::no_change: out.nu = kNeverChanges; break;
  }

  FilterState state = init();
  for (std::int64_t k = 1; k <= config.horizon; ++k) {
    const Regime regime = k < out.nu ? Regime::pre : Regime::post;
    const double y = model.sample(regime, rng);
    const FilterState next = step(state, y, model, prior);
    on_step(y, regime, state, next);
    if (rule != nullptr && !out.stop_time && rule->stopped(next)) {
      out.stop_time = next.k;
      out.x1_at_stop = next.x1;
    }
    state = next;
  }
  out.terminal = state;
  return out;
}

inline TrialSummary simulate_trial(const ObservationModel& model, const GeometricPrior& prior,
                                   const MonteCarloConfig& config, const StoppingRule* rule,
                                   std::int64_t trial_index) {
  return simulate_trial(model, prior, config, rule, trial_index,
                        [](double, Regime, const FilterState&, const FilterState&) {});
}

/// One fully recorded run. Index i of every vector is observation k = i + 1.
struct Trajectory {
  std::int64_t nu = kNeverChanges;
  std::vector<double> observations;
  std::vector<double> x1;
  std::vector<double> log_x1;
  std::vector<double> log_m;
  std::optional<std::int64_t> stop_time;

  std::size_t size() const { return observations.size(); }
  bool has_change() const { return nu != kNeverChanges; }
  TrialSummary summary() const;
};

Trajectory generate_trajectory(const ObservationModel& model, const GeometricPrior& prior,
                               const MonteCarloConfig& config, const StoppingRule& rule,
                               std::int64_t trial_index);

/// All trials of `config`, without recording paths.
std::vector<TrialSummary> run_batch(const ObservationModel& model, const GeometricPrior& prior,
                                    const MonteCarloConfig& config, const StoppingRule* rule,
                                    Execution execution = Execution::parallel);

std::vector<Trajectory> generate_batch(const ObservationModel& model, const GeometricPrior& prior,
                                       const MonteCarloConfig& config, const StoppingRule& rule,
                                       Execution execution = Execution::parallel);

using ModelFamily = std::function<std::shared_ptr<const ObservationModel>(double)>;

/// Gaussian shift family m -> GaussianShiftModel(m).
ModelFamily gaussian_shift_family();

struct SweepRow {
  double m = 0.0;
  double mean_terminal_posterior = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::int64_t horizon = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

/// Default grid 0.10, 0.15, ..., 0.60.
std::vector<double> default_m_grid();

/// Inclusive grid lo, lo + step, ..., hi computed as lo + i * step.
std::vector<double> make_grid(double lo, double hi, double step);

/// Mean and standard error of x1 at the horizon for each m, under
/// no-change data. Every m reuses the same per-trial seeds. Throws
/// std::invalid_argument unless config.change_mode is no_change.
std::vector<SweepRow> mean_terminal_posterior(std::span<const double> m_grid,
                                              const ModelFamily& family,
                                              const GeometricPrior& prior,
                                              const MonteCarloConfig& config,
                                              Execution execution = Execution::parallel);

}  // namespace shiryaev
