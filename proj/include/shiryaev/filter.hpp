#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shiryaev/observation_models.hpp"

namespace shiryaev {

/// Below this the linear posterior is reported as 0 and log_x1 carries the
/// statistic.
inline constexpr double kLinearFloor = 1e-300;

/// Rounding excursions of x1 outside [0, 1] smaller than this are clamped.
inline constexpr double kClampTolerance = 1e-12;

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No-change posterior P(nu > k | y_1..k) after k observations.
struct FilterState {
  std::int64_t k = 0;
  double x1 = 1.0;
  /// Sum of log M_j for j <= k; equals log(x1) while x1 is representable.
  double log_x1 = 0.0;
  /// log M_k of the most recent step; NaN at k = 0.
  double last_log_m = std::numeric_limits<double>::quiet_NaN();

  /// State at step 0 holding an arbitrary posterior, for probing the recursion.
  static FilterState with_posterior(double x1);

  friend bool operator==(const FilterState&, const FilterState&) = default;
};

/// Shiryaev's rule: stop at the first k >= 1 with x1 < 1 - h.
class StoppingRule {
 public:
  /// Throws std::invalid_argument unless 0 < h < 1.
  explicit StoppingRule(double h);

  double h() const { return h_; }
  double alarm_level() const { return 1.0 - h_; }

  bool stopped(const FilterState& state) const { return state.x1 < alarm_level(); }

 private:
  double h_;
};

FilterState init();

/// One step of the two-state posterior recursion
///   x1_k = N_k (1 - rho) b1(y) x1_{k-1},
///   1/N_k = b2(y) + (1 - rho) (b1(y) - b2(y)) x1_{k-1},
/// evaluated in the log domain so that large |y| cannot underflow both
/// densities. Throws FilterError if 1/N_k is not positive.
FilterState step(const FilterState& state, double y, const ObservationModel& model,
                 const GeometricPrior& prior);

struct FilterRun {
  std::vector<FilterState> path;  // one entry per observation
  std::optional<std::int64_t> stop_time;
};

/// Applies step() over all observations. Throws std::invalid_argument on
/// an empty sequence.
FilterRun run(std::span<const double> observations, const ObservationModel& model,
              const GeometricPrior& prior, const StoppingRule& rule);

inline constexpr std::size_t kDefaultOracleCap = 25;

/// Direct Bayes evaluation of P(nu > k | y_1..k) by summing over every
/// change time, in the log domain. O(k^2); independent of step().
/// Throws std::invalid_argument for k = 0 or k > max_length.
double brute_force_posterior(std::span<const double> observations, const ObservationModel& model,
                             const GeometricPrior& prior,
                             std::size_t max_length = kDefaultOracleCap);

}  // namespace shiryaev
