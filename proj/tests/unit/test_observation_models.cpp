#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "shiryaev/model_config.hpp"
#include "shiryaev/observation_models.hpp"
#include "shiryaev/stats.hpp"

namespace shiryaev {
namespace {

constexpr double kLogNormalMode = -0.91893853320467274;  // log(1 / sqrt(2 pi))

TEST(GeometricPrior, RejectsBoundaryAndOutOfRange) {
  for (double rho : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    EXPECT_THROW(GeometricPrior{rho}, std::invalid_argument) << rho;
  }
  EXPECT_NO_THROW(GeometricPrior{1e-12});
  EXPECT_NO_THROW(GeometricPrior{1.0 - 1e-12});
}

TEST(GeometricPrior, MassSumsToOne) {
  for (double rho : {0.01, 0.05, 0.2, 0.9}) {
    const GeometricPrior prior(rho);
    double total = 0.0;
    for (std::int64_t k = 1; k <= 5000; ++k) total += prior.mass(k);
    // Truncated tail is (1 - rho)^5000.
    EXPECT_NEAR(total, 1.0 - prior.survival(5000), 1e-12) << rho;
    EXPECT_NEAR(total, 1.0, 1e-9) << rho;
  }
  const GeometricPrior prior(0.05);
  EXPECT_EQ(prior.mass(0), 0.0);
  EXPECT_DOUBLE_EQ(prior.mass(1), 0.05);
  EXPECT_DOUBLE_EQ(prior.mass(3), 0.95 * 0.95 * 0.05);
}

TEST(GaussianShiftModel, LogDensityExamples) {
  const GaussianShiftModel model(0.4);
  EXPECT_NEAR(model.log_density(Regime::pre, 0.0), kLogNormalMode, 1e-15);
  EXPECT_NEAR(model.log_density(Regime::post, 0.4), kLogNormalMode, 1e-15);
  // -(0 - 0.4)^2 / 2 = -0.08.
  EXPECT_NEAR(model.log_density(Regime::post, 0.0), kLogNormalMode - 0.08, 1e-15);
  EXPECT_NEAR(kLogNormalMode, -0.9189, 5e-5);
}

TEST(GaussianShiftModel, RejectsNegativeOrNonFiniteShift) {
  EXPECT_THROW(GaussianShiftModel{-0.1}, std::invalid_argument);
  EXPECT_THROW(GaussianShiftModel{std::numeric_limits<double>::infinity()},
               std::invalid_argument);
  EXPECT_NO_THROW(GaussianShiftModel{0.0});
}

TEST(GaussianShiftModel, DensitiesIntegrateToOneAndStayBelowBound) {
  // Trapezoid rule on [-14, 14 + m]; tails are below 1e-40.
  for (double m : {0.0, 0.23, 0.4, 2.0}) {
    const GaussianShiftModel model(m);
    for (Regime r : {Regime::pre, Regime::post}) {
      const double lo = -14.0, hi = 14.0 + m;
      const int n = 200000;
      const double dx = (hi - lo) / n;
      double integral = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double y = lo + i * dx;
        const double b = std::exp(model.log_density(r, y));
        EXPECT_LE(b, model.density_bound() * (1 + 1e-15));
        integral += (i == 0 || i == n ? 0.5 : 1.0) * b;
      }
      EXPECT_NEAR(integral * dx, 1.0, 1e-9) << "m=" << m;
    }
  }
  EXPECT_NEAR(GaussianShiftModel(0.4).density_bound(), 1.0 / std::sqrt(2.0 * std::numbers::pi),
              1e-16);
}

TEST(GaussianShiftModel, SampleMoments) {
  const GaussianShiftModel model(0.4);
  RandomStream rng(11);
  RunningStats pre, post;
  for (int i = 0; i < 100000; ++i) pre.add(model.sample(Regime::pre, rng));
  for (int i = 0; i < 100000; ++i) post.add(model.sample(Regime::post, rng));
  EXPECT_NEAR(pre.mean(), 0.0, 0.02);
  EXPECT_NEAR(post.mean(), 0.4, 0.02);
  EXPECT_NEAR(pre.variance(), 1.0, 0.03);
  EXPECT_NEAR(post.variance(), 1.0, 0.03);
}

TEST(GaussianShiftModel, SeedDeterminism) {
  const GaussianShiftModel model(0.23);
  RandomStream a(42, 7), b(42, 7), other_index(42, 8), other_seed(43, 7);
  bool differs_index = false, differs_seed = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = model.sample(Regime::pre, a);
    EXPECT_EQ(x, model.sample(Regime::pre, b));
    differs_index |= x != model.sample(Regime::pre, other_index);
    differs_seed |= x != model.sample(Regime::pre, other_seed);
  }
  EXPECT_TRUE(differs_index);
  EXPECT_TRUE(differs_seed);
}

TEST(GaussianShiftModel, ClosedFormKl) {
  EXPECT_DOUBLE_EQ(GaussianShiftModel(0.4).kl_pre_post().value, 0.08);
  EXPECT_EQ(GaussianShiftModel(0.0).kl_pre_post().value, 0.0);
  const KlEstimate kl = GaussianShiftModel(0.23).kl_pre_post();
  EXPECT_TRUE(kl.exact);
  EXPECT_NEAR(kl.value, 0.026450, 1e-15);
}

TEST(MonteCarloKl, AgreesWithClosedFormWithinThreeStandardErrors) {
  for (double m : {0.1, 0.23, 0.4, 0.6}) {
    const GaussianShiftModel model(m);
    const KlEstimate mc = monte_carlo_kl(model, KlDirection::forward, {1'000'000, 1e-2, 99});
    EXPECT_FALSE(mc.exact);
    EXPECT_NEAR(mc.value, 0.5 * m * m, 3.0 * mc.std_error) << "m=" << m;
  }
}

TEST(MonteCarloKl, ReverseDivergenceIsNonNegative) {
  for (double m : {0.0, 0.1, 0.4}) {
    const GaussianShiftModel model(m);
    const KlEstimate rev = monte_carlo_kl(model, KlDirection::reverse, {200'000, 1e-2, 5});
    EXPECT_GE(rev.value, -3.0 * rev.std_error) << "m=" << m;
  }
}

TEST(MonteCarloKl, NonNegativeAcrossRandomShifts) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> shift(0.0, 1.5);
  for (int i = 0; i < 20; ++i) {
    const GaussianShiftModel model(shift(gen));
    EXPECT_GE(model.kl_pre_post().value, 0.0);
    const auto mc = monte_carlo_kl(model, KlDirection::forward, {20'000, 1.0, gen()});
    EXPECT_GE(mc.value, -3.0 * mc.std_error);
  }
}

TEST(MonteCarloKl, SignalsMissedTolerance) {
  const GaussianShiftModel model(0.4);
  EXPECT_THROW(monte_carlo_kl(model, KlDirection::forward, {1000, 1e-9, 1}), KlConvergenceError);
}

DensityPairModel gaussian_pair(double m, MonteCarloKlOptions kl = {}) {
  return DensityPairModel(
      [](double y) { return -0.5 * y * y - kLogSqrtTwoPi; },
      [m](double y) { return -0.5 * (y - m) * (y - m) - kLogSqrtTwoPi; },
      [](RandomStream& rng) { return rng.standard_normal(); },
      [m](RandomStream& rng) { return m + rng.standard_normal(); }, 0.4,
      {"gaussian_pair", kl});
}

TEST(DensityPairModel, MonteCarloKlMatchesGaussianClosedForm) {
  const auto model = gaussian_pair(0.4);
  const KlEstimate kl = model.kl_pre_post();
  EXPECT_FALSE(kl.exact);
  EXPECT_EQ(kl.samples, 1'000'000u);
  EXPECT_NEAR(kl.value, 0.08, 3.0 * kl.std_error);
}

TEST(DensityPairModel, PropagatesConvergenceFailure) {
  const auto model = gaussian_pair(0.4, {500, 1e-9, 1});
  EXPECT_THROW(model.kl_pre_post(), KlConvergenceError);
}

TEST(DensityPairModel, RequiresDeclaredBound) {
  auto f = [](double) { return 0.0; };
  auto s = [](RandomStream&) { return 0.0; };
  EXPECT_THROW(DensityPairModel(f, f, s, s, 0.0), std::invalid_argument);
  EXPECT_THROW(DensityPairModel(f, f, s, s, std::numeric_limits<double>::infinity()),
               std::invalid_argument);
  EXPECT_THROW(DensityPairModel(f, nullptr, s, s, 1.0), std::invalid_argument);
}

TEST(ModelConfig, BuildsGaussianShiftByName) {
  for (const char* name : {"gaussian_shift", "gaussian-shift"}) {
    const auto model = model_from_json({{"model", name}, {"m", 0.23}});
    const auto* g = dynamic_cast<const GaussianShiftModel*>(model.get());
    ASSERT_NE(g, nullptr);
    EXPECT_EQ(g->shift(), 0.23);
    EXPECT_EQ(model_to_json(*model), (nlohmann::json{{"model", "gaussian_shift"}, {"m", 0.23}}));
  }
}

TEST(ModelConfig, RejectsBadSpecs) {
  EXPECT_THROW(model_from_json({{"model", "laplace"}, {"m", 1.0}}), std::invalid_argument);
  EXPECT_THROW(model_from_json({{"model", "gaussian_shift"}}), std::invalid_argument);
  EXPECT_THROW(model_from_json({{"m", 1.0}}), std::invalid_argument);
  EXPECT_THROW(model_from_json({{"model", "gaussian_shift"}, {"m", -1.0}}),
               std::invalid_argument);
  EXPECT_THROW(model_from_json(nlohmann::json::array()), std::invalid_argument);
}

}  // namespace
}  // namespace shiryaev
