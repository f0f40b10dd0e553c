#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace anosov {
namespace {

Eigen::VectorXd beta_vector() {
  const Vec2 b = splitting(testing::normalized()).beta();
  return Eigen::Vector2d(b[0], b[1]);
}

FourierSeries random_real_series(int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  FourierSeries a(2);
  for (int p1 = -band; p1 <= band; ++p1)
    for (int p2 = -band; p2 <= band; ++p2) {
      if (p1 * p1 + p2 * p2 > band * band || (p1 == 0 && p2 == 0)) continue;
      // One of each +-p pair; the other is its conjugate.
      if (p1 < 0 || (p1 == 0 && p2 < 0)) continue;
      const std::complex<double> c(g(rng), g(rng));
      a.set({p1, p2}, c);
      a.set({-p1, -p2}, std::conj(c));
    }
  return a;
}

TEST(Fourier, EvaluateAndDerivative) {
  const FourierSeries f = FourierSeries::cosine({2, -1}, 1.5, 0.3);
  EXPECT_TRUE(f.is_real());
  const Eigen::Vector2d x(0.17, 0.71);
  const double u = kTwoPi * (2 * x[0] - x[1]) + 0.3;
  EXPECT_NEAR(f.evaluate(x), 1.5 * std::cos(u), 1e-14);
  const Eigen::Vector2d v(0.6, 0.8);
  EXPECT_NEAR(f.derivative(v).evaluate(x), -1.5 * std::sin(u) * kTwoPi * (2 * 0.6 - 0.8), 1e-12);
  const Eigen::Vector2d s(0.05, -0.2);
  EXPECT_NEAR(f.translated(s).evaluate(x), f.evaluate(Eigen::Vector2d(x + s)), 1e-14);
}

TEST(Fourier, FromGridRecoversBandLimitedSamples) {
  const int M = 32;
  FourierSeries truth = FourierSeries::cosine({3, 1}, 0.7, 0.2);
  truth.add({0, 0}, 0.25);
  ScalarGrid2 g(M);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = truth.evaluate(Eigen::VectorXd(g.node(i)));
  const FourierSeries rec = FourierSeries::from_grid(g, 8);
  EXPECT_LT((rec - truth).max_abs(), 1e-14);
  EXPECT_NEAR(rec.mean().real(), 0.25, 1e-15);
}

TEST(TranslationSolver, SingleModeClosedForm) {
  const Eigen::VectorXd beta = beta_vector();
  for (const Frequency p : {Frequency{1, 0}, Frequency{6, -7}, Frequency{-3, 11}}) {
    const FourierSeries a = FourierSeries::cosine(p);
    const TranslationSolution sol = solve_translation_cohomology(a, beta);
    const double theta = kTwoPi * (p[0] * beta[0] + p[1] * beta[1]);
    // phi(x) = sin(u - theta/2) / (2 sin(theta/2)) solves phi(x + beta) - phi(x) = cos(u).
    for (double x1 : {0.0, 0.31, 0.77})
      for (double x2 : {0.0, 0.45}) {
        const Eigen::Vector2d x(x1, x2);
        const double u = kTwoPi * (p[0] * x1 + p[1] * x2);
        const double expected = std::sin(u - 0.5 * theta) / (2.0 * std::sin(0.5 * theta));
        EXPECT_NEAR(sol.phi.evaluate(x), expected, 1e-12 * std::max(1.0, std::abs(expected)));
      }
  }
}

TEST(TranslationSolver, ExactOnBand64) {
  const Eigen::VectorXd beta = beta_vector();
  const FourierSeries a = random_real_series(64, 11);
  const TranslationSolution sol = solve_translation_cohomology(a, beta);
  EXPECT_TRUE(sol.phi.is_real(1e-10));
  double worst = 0.0;
  for (const auto& [p, c] : a.coefficients()) {
    const double th = kTwoPi * (p[0] * beta[0] + p[1] * beta[1]);
    const std::complex<double> mult(std::cos(th) - 1.0, std::sin(th));
    worst = std::max(worst, std::abs(sol.phi.get(p) * mult - c));
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_LT(translation_residual(sol.phi, a, beta).max_abs(), 1e-12);
  EXPECT_EQ(sol.phi.mean(), std::complex<double>(0.0));
}

TEST(TranslationSolver, DivisorBounds) {
  const Eigen::VectorXd beta = beta_vector();
  const TranslationSolution sol = solve_translation_cohomology(random_real_series(24, 3), beta);
  ASSERT_FALSE(sol.profile.entries.empty());
  double min_div = 1e300;
  for (const auto& e : sol.profile.entries) {
    EXPECT_GE(e.divisor, 4.0 * e.distance - 1e-15);
    EXPECT_GE(e.divisor, 4.0 * e.distance / std::numbers::pi);
    EXPECT_LE(e.divisor, kTwoPi * e.distance + 1e-15);
    EXPECT_NEAR(e.amplification, 1.0 / e.divisor, 1e-9 / e.divisor);
    min_div = std::min(min_div, e.divisor);
  }
  EXPECT_EQ(sol.profile.min_divisor, min_div);
}

TEST(TranslationSolver, RejectsNonzeroMean) {
  FourierSeries a = FourierSeries::cosine({1, 2});
  a.set({0, 0}, 0.1);
  try {
    solve_translation_cohomology(a, beta_vector());
    FAIL() << "expected NonzeroMean";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonzeroMean);
  }
}

TEST(TranslationSolver, DivisorFloor) {
  // (6, -7) is the worst small divisor of this beta within |p| <= 200.
  const FourierSeries a = FourierSeries::cosine({6, -7});
  try {
    solve_translation_cohomology(a, beta_vector(), 0.1);
    FAIL() << "expected SmallDivisorFloor";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SmallDivisorFloor);
  }
}

TEST(RegularityLoss, PowerLawEnvelopes) {
  const Eigen::VectorXd beta = beta_vector();
  FourierSeries a(2);
  for (int p1 = -40; p1 <= 40; ++p1)
    for (int p2 = -40; p2 <= 40; ++p2) {
      const double r = std::hypot(p1, p2);
      if (r == 0 || r > 40) continue;
      a.set({p1, p2}, std::pow(r, -4.0));
    }
  const TranslationSolution sol = solve_translation_cohomology(a, beta);
  const RegularityLoss loss = regularity_loss_estimate(a, sol.phi);
  EXPECT_NEAR(loss.decay_a, 4.0, 0.05);
  EXPECT_GE(loss.shells, 3);
  // Small divisors of size ~ c |p|^-2 cost at most two orders.
  EXPECT_GT(loss.loss, -0.5);
  EXPECT_LT(loss.loss, 2.5);
}

TEST(RegularityLoss, NeedsThreeShells) {
  const FourierSeries a = FourierSeries::cosine({1, 0});
  try {
    regularity_loss_estimate(a, a);
    FAIL() << "expected DegenerateFit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateFit);
  }
}

}  // namespace
}  // namespace anosov
