#pragma once

#include <optional>

#include "shiryaev/observation_models.hpp"

namespace shiryaev {

/// Whether measurements carry enough information to overcome the
/// geometric prior's per-step decay.
struct InformativenessReport {
  double kl = 0.0;               // D(b1 || b2)
  double kl_std_error = 0.0;     // zero for closed forms
  double prior_threshold = 0.0;  // log(1 / (1 - rho))
  /// kl >= prior_threshold. When false, log x1 is a weak practical
  /// super-martingale: once small it keeps drifting down even with no change.
  bool informative = false;
  /// Limit of E[log M_k | x1_{k-1}] as x1_{k-1} -> 0: log(1 - rho) + kl.
  double drift_bound = 0.0;
  /// Critical mean shift; Gaussian shift models only.
  std::optional<double> critical_parameter;
};

/// log(1 / (1 - rho)).
double prior_threshold(const GeometricPrior& prior);

/// Propagates KlConvergenceError from Monte Carlo divergence estimates.
InformativenessReport diagnose(const ObservationModel& model, const GeometricPrior& prior);

/// sqrt(2 log(1 / (1 - rho))): unit-variance Gaussian shifts below it are
/// not informative.
double critical_mean(const GeometricPrior& prior);

/// m^2 / 2 < log(1 / (1 - rho)). Throws std::invalid_argument unless m > 0.
bool membership(double m, const GeometricPrior& prior);

}  // namespace shiryaev
