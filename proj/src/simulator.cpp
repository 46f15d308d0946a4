#include "shiryaev/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiryaev/stats.hpp"

namespace shiryaev {

ChangeMode ChangeMode::fixed(std::int64_t nu) {
  if (nu < 1) throw std::invalid_argument(fmt::format("nu must be >= 1, got {}", nu));
  return ChangeMode(Kind::fixed_nu, nu);
}

void MonteCarloConfig::validate() const {
  if (trials < 1) throw std::invalid_argument(fmt::format("trials must be >= 1, got {}", trials));
  if (horizon < 1) {
    throw std::invalid_argument(fmt::format("horizon must be >= 1, got {}", horizon));
  }
}

std::int64_t sample_change_time(const GeometricPrior& prior, RandomStream& rng) {
  // Inversion: P(nu > k) = (1 - rho)^k.
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double extra = std::floor(std::log(u) / prior.log_stay());
  constexpr auto cap = static_cast<double>(kNeverChanges / 2);
  return 1 + static_cast<std::int64_t>(std::min(extra, cap));
}

TrialSummary Trajectory::summary() const {
  TrialSummary s;
  s.nu = nu;
  s.stop_time = stop_time;
  if (stop_time) s.x1_at_stop = x1[static_cast<std::size_t>(*stop_time - 1)];
  if (!observations.empty()) {
    s.terminal.k = static_cast<std::int64_t>(size());
    s.terminal.x1 = x1.back();
    s.terminal.log_x1 = log_x1.back();
    s.terminal.last_log_m = log_m.back();
  }
  return s;
}

Trajectory generate_trajectory(const ObservationModel& model, const GeometricPrior& prior,
                               const MonteCarloConfig& config, const StoppingRule& rule,
                               std::int64_t trial_index) {
  config.validate();
  Trajectory t;
  const auto n = static_cast<std::size_t>(config.horizon);
  t.observations.reserve(n);
  t.x1.reserve(n);
  t.log_x1.reserve(n);
  t.log_m.reserve(n);
  const TrialSummary s = simulate_trial(
      model, prior, config, &rule, trial_index,
      [&t](double y, Regime, const FilterState&, const FilterState& after) {
        t.observations.push_back(y);
        t.x1.push_back(after.x1);
        t.log_x1.push_back(after.log_x1);
        t.log_m.push_back(after.last_log_m);
      });
  t.nu = s.nu;
  t.stop_time = s.stop_time;
  return t;
}

std::vector<TrialSummary> run_batch(const ObservationModel& model, const GeometricPrior& prior,
                                    const MonteCarloConfig& config, const StoppingRule* rule,
                                    Execution execution) {
  config.validate();
  return for_each_trial(config.trials, execution, [&](std::int64_t i) {
    return simulate_trial(model, prior, config, rule, i);
  });
}

std::vector<Trajectory> generate_batch(const ObservationModel& model, const GeometricPrior& prior,
                                       const MonteCarloConfig& config, const StoppingRule& rule,
                                       Execution execution) {
  config.validate();
  return for_each_trial(config.trials, execution, [&](std::int64_t i) {
    return generate_trajectory(model, prior, config, rule, i);
  });
}

ModelFamily gaussian_shift_family() {
  return [](double m) -> std::shared_ptr<const ObservationModel> {
    return std::make_shared<GaussianShiftModel>(m);
  };
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument(
        fmt::format("grid needs step > 0 and hi >= lo, got lo={} hi={} step={}", lo, hi, step));
  }
  // Half-step slack so that a nominal endpoint like 0.60 survives rounding.
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

std::vector<double> default_m_grid() { return make_grid(0.10, 0.60, 0.05); }

std::vector<SweepRow> mean_terminal_posterior(std::span<const double> m_grid,
                                              const ModelFamily& family,
                                              const GeometricPrior& prior,
                                              const MonteCarloConfig& config,
                                              Execution execution) {
  config.validate();
  if (config.change_mode.kind() != ChangeMode::Kind::no_change) {
    throw std::invalid_argument("mean_terminal_posterior requires no-change data");
  }
  std::vector<SweepRow> rows;
  rows.reserve(m_grid.size());
  for (const double m : m_grid) {
    const auto model = family(m);
    const auto trials = run_batch(*model, prior, config, nullptr, execution);
    RunningStats terminal;
    for (const auto& t : trials) terminal.add(t.terminal.x1);  // fixed trial order
    rows.push_back({m, terminal.mean(), terminal.std_error(), config.trials, config.horizon,
                    prior.rho(), config.seed});
  }
  return rows;
}

}  // namespace shiryaev
