#include "shiryaev/filter.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace shiryaev {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// expm1 overflows past ~709; above this the mixture is evaluated by log-sum-exp.
constexpr double kExpm1Limit = 700.0;

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace

FilterState FilterState::with_posterior(double x1) {
  if (!(x1 >= 0.0 && x1 <= 1.0)) {
    throw std::invalid_argument(fmt::format("posterior must lie in [0, 1], got {}", x1));
  }
  FilterState s;
  s.x1 = x1;
  s.log_x1 = x1 > 0.0 ? std::log(x1) : kNegInf;
  return s;
}

StoppingRule::StoppingRule(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw std::invalid_argument(fmt::format("h must lie in (0, 1), got {}", h));
  }
}

FilterState init() { return FilterState{}; }

FilterState step(const FilterState& state, double y, const ObservationModel& model,
                 const GeometricPrior& prior) {
  const double lb1 = model.log_density(Regime::pre, y);
  const double lb2 = model.log_density(Regime::post, y);
  if (std::isnan(lb1) || std::isnan(lb2) || (lb1 == kNegInf && lb2 == kNegInf)) {
    throw FilterError(fmt::format("observation y = {} has zero or undefined density under "
                                  "both regimes of model {}",
                                  y, model.name()));
  }

  // a = (1 - rho) x1_{k-1}; the log form keeps it meaningful below the linear floor.
  const double log_prev = state.x1 > kLinearFloor ? std::log(state.x1) : state.log_x1;
  const double log_a = prior.log_stay() + log_prev;
  const double a = std::exp(log_a);

  // 1/N_k = b2 + a (b1 - b2) = b2 (1 + a expm1(l)),  l = log(b1 / b2).
  // M_k = (1 - rho) b1 N_k, written in terms of l only.
  const double l = lb1 - lb2;
  double log_m;
  if (std::isfinite(lb2) && l < kExpm1Limit) {
    const double inner = a * std::expm1(l);
    if (!(inner > -1.0)) {
      throw FilterError(fmt::format("normalisation factor is not positive at y = {}", y));
    }
    log_m = prior.log_stay() + l - std::log1p(inner);
  } else {
    // b1 / (1/N_k) = 1 / (a + (1 - a) / exp(l)), with 1 - a >= rho > 0.
    log_m = prior.log_stay() - log_add_exp(log_a, std::log(-std::expm1(log_a)) - l);
  }
  if (std::isnan(log_m) || log_m == std::numeric_limits<double>::infinity()) {
    throw FilterError(fmt::format("normalisation factor is not positive at y = {}", y));
  }

  FilterState next;
  next.k = state.k + 1;
  next.last_log_m = log_m;
  next.log_x1 = state.log_x1 + log_m;

  double x1 = state.x1 > kLinearFloor ? state.x1 * std::exp(next.last_log_m)
                                      : std::exp(next.log_x1);
  if (x1 > 1.0) {
    if (x1 - 1.0 >= kClampTolerance) {
      throw FilterError(fmt::format("posterior left [0, 1]: x1 = {} at k = {}", x1, next.k));
    }
    x1 = 1.0;
  }
  next.x1 = x1 > kLinearFloor ? x1 : 0.0;
  return next;
}

FilterRun run(std::span<const double> observations, const ObservationModel& model,
              const GeometricPrior& prior, const StoppingRule& rule) {
  if (observations.empty()) {
    throw std::invalid_argument("run() needs at least one observation");
  }
  FilterRun out;
  out.path.reserve(observations.size());
  FilterState state = init();
  for (const double y : observations) {
    state = step(state, y, model, prior);
    out.path.push_back(state);
    if (!out.stop_time && rule.stopped(state)) out.stop_time = state.k;
  }
  return out;
}

double brute_force_posterior(std::span<const double> observations, const ObservationModel& model,
                             const GeometricPrior& prior, std::size_t max_length) {
  const std::size_t k = observations.size();
  if (k == 0) throw std::invalid_argument("brute_force_posterior needs k >= 1 observations");
  if (k > max_length) {
    throw std::invalid_argument(
        fmt::format("brute_force_posterior capped at k = {}, got {}", max_length, k));
  }

  std::vector<double> lb1(k), lb2(k);
  for (std::size_t i = 0; i < k; ++i) {
    lb1[i] = model.log_density(Regime::pre, observations[i]);
    lb2[i] = model.log_density(Regime::post, observations[i]);
  }

  // nu > k: every observation pre-change, prior mass (1 - rho)^k.
  double log_no_change = static_cast<double>(k) * prior.log_stay();
  for (std::size_t i = 0; i < k; ++i) log_no_change += lb1[i];

  double log_evidence = log_no_change;
  for (std::size_t j = 1; j <= k; ++j) {
    double term = prior.log_mass(static_cast<std::int64_t>(j));
    for (std::size_t i = 1; i <= k; ++i) term += i < j ? lb1[i - 1] : lb2[i - 1];
    log_evidence = log_add_exp(log_evidence, term);
  }
  if (log_evidence == kNegInf || std::isnan(log_evidence)) {
    throw FilterError("observation sequence has zero likelihood under every change time");
  }
  return std::exp(log_no_change - log_evidence);
}

}  // namespace shiryaev
