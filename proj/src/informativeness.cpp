#include "shiryaev/informativeness.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace shiryaev {

double prior_threshold(const GeometricPrior& prior) { return -prior.log_stay(); }

InformativenessReport diagnose(const ObservationModel& model, const GeometricPrior& prior) {
  const KlEstimate kl = model.kl_pre_post();
  InformativenessReport report;
  report.kl = kl.value;
  report.kl_std_error = kl.std_error;
  report.prior_threshold = prior_threshold(prior);
  // Equality counts as informative; the collapse result needs strict "<".
  report.informative = report.kl >= report.prior_threshold;
  report.drift_bound = prior.log_stay() + report.kl;
  if (dynamic_cast<const GaussianShiftModel*>(&model) != nullptr) {
    report.critical_parameter = critical_mean(prior);
  }
  return report;
}

double critical_mean(const GeometricPrior& prior) {
  return std::sqrt(2.0 * prior_threshold(prior));
}

bool membership(double m, const GeometricPrior& prior) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw std::invalid_argument(fmt::format("m must be finite and > 0, got {}", m));
  }
  // Same set as m^2 / 2 < log(1 / (1 - rho)); comparing against m_c keeps
  // the boundary m = m_c outside under rounding.
  return m < critical_mean(prior);
}

}  // namespace shiryaev
