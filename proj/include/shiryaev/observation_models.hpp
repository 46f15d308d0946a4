#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "shiryaev/random.hpp"

namespace shiryaev {

enum class Regime { pre, post };

/// Geometric prior on the change time: P(nu = k) = (1 - rho)^(k-1) rho, k >= 1.
class GeometricPrior {
 public:
  /// Throws std::invalid_argument unless 0 < rho < 1.
  explicit GeometricPrior(double rho);

  double rho() const { return rho_; }

  /// log(1 - rho), the per-step log prior decay.
  double log_stay() const { return log_stay_; }

  double mass(std::int64_t k) const;
  double log_mass(std::int64_t k) const;

  /// P(nu > k) = (1 - rho)^k.
  double survival(std::int64_t k) const;

 private:
  double rho_;
  double log_stay_;
};

struct KlEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;  // zero for closed forms
  bool exact = false;
};

/// Raised when a Monte Carlo divergence estimate misses its tolerance.
class KlConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MonteCarloKlOptions {
  std::size_t samples = 1'000'000;
  double tolerance = 1e-3;
  std::uint64_t seed = 0x6b6c;  // "kl"
};

/// Pre/post-change pair of scalar densities b1, b2.
///
/// Implementations are immutable after construction and may be shared
/// between concurrently running trials.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;

  virtual std::string name() const = 0;

  /// log b_i(y); may be -inf outside the support.
  virtual double log_density(Regime regime, double y) const = 0;

  virtual double sample(Regime regime, RandomStream& rng) const = 0;

  /// Finite B with b_i(y) <= B everywhere. Metadata only; not enforced per sample.
  virtual double density_bound() const = 0;

  /// D(b1 || b2) = E_pre[log(b1 / b2)]. The default is a Monte Carlo
  /// estimate with default options; models with a closed form override it.
  virtual KlEstimate kl_pre_post() const;

  double log_likelihood_ratio(double y) const {
    return log_density(Regime::pre, y) - log_density(Regime::post, y);
  }
};

enum class KlDirection {
  forward,  // E_pre[log(b1 / b2)]
  reverse,  // E_post[log(b2 / b1)]
};

/// Plain Monte Carlo divergence estimate. Throws KlConvergenceError if the
/// standard error exceeds options.tolerance after options.samples draws, or
/// if any log ratio is not finite.
KlEstimate monte_carlo_kl(const ObservationModel& model, KlDirection direction,
                          const MonteCarloKlOptions& options = {});

/// Unit-variance normals with means 0 (pre) and m (post).
class GaussianShiftModel final : public ObservationModel {
 public:
  /// Throws std::invalid_argument unless m is finite and m >= 0. m = 0 is the
  /// degenerate b1 == b2 model.
  explicit GaussianShiftModel(double m);

  double shift() const { return m_; }

  std::string name() const override { return "gaussian_shift"; }
  double log_density(Regime regime, double y) const override;
  double sample(Regime regime, RandomStream& rng) const override;
  double density_bound() const override;

  /// Closed form m^2 / 2.
  KlEstimate kl_pre_post() const override;

 private:
  double m_;
};

/// Model assembled from caller-supplied densities and samplers. Must
/// declare its density bound; divergence comes from Monte Carlo.
class DensityPairModel final : public ObservationModel {
 public:
  using LogDensity = std::function<double(double)>;
  using Sampler = std::function<double(RandomStream&)>;

  struct Options {
    std::string name = "density_pair";
    MonteCarloKlOptions kl;
  };

  DensityPairModel(LogDensity log_pre, LogDensity log_post, Sampler sample_pre,
                   Sampler sample_post, double density_bound, Options options);
  DensityPairModel(LogDensity log_pre, LogDensity log_post, Sampler sample_pre,
                   Sampler sample_post, double density_bound);

  std::string name() const override { return options_.name; }
  double log_density(Regime regime, double y) const override;
  double sample(Regime regime, RandomStream& rng) const override;
  double density_bound() const override { return bound_; }
  KlEstimate kl_pre_post() const override;

 private:
  LogDensity log_pre_, log_post_;
  Sampler sample_pre_, sample_post_;
  double bound_;
  Options options_;
};

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

}  // namespace shiryaev
