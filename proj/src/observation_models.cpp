#include "shiryaev/observation_models.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "shiryaev/stats.hpp"

namespace shiryaev {

GeometricPrior::GeometricPrior(double rho) : rho_(rho), log_stay_(std::log1p(-rho)) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument(fmt::format("rho must lie in (0, 1), got {}", rho));
  }
}

double GeometricPrior::log_mass(std::int64_t k) const {
  if (k < 1) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(k - 1) * log_stay_ + std::log(rho_);
}

double GeometricPrior::mass(std::int64_t k) const { return std::exp(log_mass(k)); }

double GeometricPrior::survival(std::int64_t k) const {
  if (k <= 0) return 1.0;
  return std::exp(static_cast<double>(k) * log_stay_);
}

KlEstimate ObservationModel::kl_pre_post() const {
  return monte_carlo_kl(*this, KlDirection::forward);
}

KlEstimate monte_carlo_kl(const ObservationModel& model, KlDirection direction,
                          const MonteCarloKlOptions& options) {
  if (options.samples < 2) {
    throw std::invalid_argument("monte_carlo_kl needs at least 2 samples");
  }
  const Regime regime = direction == KlDirection::forward ? Regime::pre : Regime::post;
  const double sign = direction == KlDirection::forward ? 1.0 : -1.0;

  RandomStream rng(options.seed);
  RunningStats stats;
  for (std::size_t i = 0; i < options.samples; ++i) {
    const double y = model.sample(regime, rng);
    const double log_ratio = sign * model.log_likelihood_ratio(y);
    if (!std::isfinite(log_ratio)) {
      throw KlConvergenceError(
          fmt::format("non-finite log density ratio at y = {} for model {}", y, model.name()));
    }
    stats.add(log_ratio);
  }

  KlEstimate est{stats.mean(), stats.std_error(), options.samples, false};
  if (!(est.std_error <= options.tolerance)) {
    throw KlConvergenceError(fmt::format(
        "KL estimate for {} did not converge: standard error {} > tolerance {} after {} samples",
        model.name(), est.std_error, options.tolerance, options.samples));
  }
  return est;
}

// ---------------------------------------------------------------------------

GaussianShiftModel::GaussianShiftModel(double m) : m_(m) {
  if (!(std::isfinite(m) && m >= 0.0)) {
    throw std::invalid_argument(fmt::format("m must be finite and >= 0, got {}", m));
  }
}

double GaussianShiftModel::log_density(Regime regime, double y) const {
  const double d = regime == Regime::pre ? y : y - m_;
  return -0.5 * d * d - kLogSqrtTwoPi;
}

double GaussianShiftModel::sample(Regime regime, RandomStream& rng) const {
  const double z = rng.standard_normal();
  return regime == Regime::pre ? z : z + m_;
}

double GaussianShiftModel::density_bound() const { return std::exp(-kLogSqrtTwoPi); }

KlEstimate GaussianShiftModel::kl_pre_post() const { return {0.5 * m_ * m_, 0.0, 0, true}; }

// ---------------------------------------------------------------------------

DensityPairModel::DensityPairModel(LogDensity log_pre, LogDensity log_post, Sampler sample_pre,
                                   Sampler sample_post, double density_bound, Options options)
    : log_pre_(std::move(log_pre)),
      log_post_(std::move(log_post)),
      sample_pre_(std::move(sample_pre)),
      sample_post_(std::move(sample_post)),
      bound_(density_bound),
      options_(std::move(options)) {
  if (!log_pre_ || !log_post_ || !sample_pre_ || !sample_post_) {
    throw std::invalid_argument("DensityPairModel requires both densities and both samplers");
  }
  if (!(std::isfinite(bound_) && bound_ > 0.0)) {
    throw std::invalid_argument(
        fmt::format("density bound must be finite and positive, got {}", bound_));
  }
}

DensityPairModel::DensityPairModel(LogDensity log_pre, LogDensity log_post, Sampler sample_pre,
                                   Sampler sample_post, double density_bound)
    : DensityPairModel(std::move(log_pre), std::move(log_post), std::move(sample_pre),
                       std::move(sample_post), density_bound, Options{}) {}

double DensityPairModel::log_density(Regime regime, double y) const {
  return regime == Regime::pre ? log_pre_(y) : log_post_(y);
}

double DensityPairModel::sample(Regime regime, RandomStream& rng) const {
  return regime == Regime::pre ? sample_pre_(rng) : sample_post_(rng);
}

KlEstimate DensityPairModel::kl_pre_post() const {
  return monte_carlo_kl(*this, KlDirection::forward, options_.kl);
}

}  // namespace shiryaev
