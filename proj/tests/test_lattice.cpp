#include "support.hpp"

#include <gtest/gtest.h>

namespace anosov {
namespace {

using testing::closed_form_lambdas;
using testing::companion;
using testing::normalized;

TEST(Lattice, RejectsNonUnimodular) {
  IMat3 m = IMat3::Identity();
  m(0, 0) = 2;
  try {
    LatticeAutomorphism L(m);
    FAIL() << "expected NotUnimodular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnimodular);
  }
}

TEST(Lattice, InverseAndPowers) {
  const auto L = companion();
  EXPECT_EQ(L.power(3).entries(), (L.entries() * L.entries() * L.entries()).eval());
  EXPECT_EQ((L.entries() * L.inverse().entries()).eval(), IMat3::Identity());
  EXPECT_EQ(L.power(-2), normalized());
  EXPECT_EQ(L.power(0).entries(), IMat3::Identity());
}

TEST(Spectrum, CompanionRootsMatchClosedForm) {
  const SpectrumReport s = spectrum(companion());
  EXPECT_TRUE(s.real_spectrum);
  // Roots of x^3 - 3x^2 + 1, ascending modulus.
  const double pi = std::numbers::pi;
  std::array<double, 3> roots = {1 + 2 * std::cos(pi / 9), 1 + 2 * std::cos(7 * pi / 9),
                                 1 + 2 * std::cos(13 * pi / 9)};
  std::sort(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.eigenvalues[i].real(), roots[i], 1e-13);
    EXPECT_EQ(s.eigenvalues[i].imag(), 0.0);
  }
  EXPECT_LT(s.max_residual, 1e-12);
  // -0.53 and 0.65 are not ordered positive, so the matrix itself is not normalized.
  EXPECT_FALSE(s.satisfies_ordering);
}

TEST(Spectrum, NormalizationPicksInverseSquare) {
  const Normalization n = normalize_spectrum(companion());
  EXPECT_EQ(n.power, -2);
  EXPECT_EQ(n.matrix, normalized());
  const SpectrumReport s = spectrum(n.matrix);
  EXPECT_TRUE(s.satisfies_ordering);
  const auto l = closed_form_lambdas();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.eigenvalues[i].real(), l[i], 1e-13);
  EXPECT_NEAR(l[0], 0.12061475842818323, 1e-15);
  EXPECT_NEAR(l[1], 2.3472963553338606, 1e-14);
  EXPECT_NEAR(l[2], 3.5320888862379554, 1e-14);
}

TEST(Spectrum, ProductOfEigenvaluesIsDeterminant) {
  const SpectrumReport s = spectrum(normalized());
  const auto prod = s.eigenvalues[0] * s.eigenvalues[1] * s.eigenvalues[2];
  EXPECT_NEAR(prod.real(), double(normalized().determinant()), 1e-12);
}

TEST(Spectrum, ComplexSpectrumHasNoNormalization) {
  // x^3 - x - 1 has one real root and a complex pair.
  const auto L = LatticeAutomorphism::from_rows({{{0, 1, 0}, {0, 0, 1}, {1, 1, 0}}});
  try {
    normalize_spectrum(L);
    FAIL() << "expected NoRealNormalization";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRealNormalization);
  }
}

TEST(Spectrum, UnitEigenvalueIsNotHyperbolic) {
  const auto L = LatticeAutomorphism::from_rows({{{1, 0, 0}, {0, 2, 1}, {0, 1, 1}}});
  try {
    spectrum(L);
    FAIL() << "expected NotHyperbolic";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHyperbolic);
  }
}

TEST(Splitting, EigenvectorsAreNullVectors) {
  const Splitting sp = splitting(normalized());
  const Mat3 N = normalized().matrix();
  const auto l = closed_form_lambdas();
  for (int i = 0; i < 3; ++i) {
    const Bundle b = std::array{Bundle::Stable, Bundle::WeakUnstable, Bundle::StrongUnstable}[i];
    const Vec3& e = sp.direction(b);
    EXPECT_NEAR(sp.eigenvalue(b), l[i], 1e-13);
    EXPECT_NEAR(e.norm(), 1.0, 1e-15);
    // Independent null vector: cross product of two rows of N - lambda I.
    const Mat3 M = N - l[i] * Mat3::Identity();
    Vec3 v = M.row(0).transpose().cross(M.row(1).transpose()).normalized();
    if (v[0] < 0) v = -v;
    EXPECT_LT((e - v).norm(), 1e-12) << to_string(b);
  }
  EXPECT_LT((sp.e_s - Vec3(0.32596515, 0.11320651, -0.93857925)).norm(), 1e-8);
  EXPECT_LT((sp.e_wu - Vec3(0.51479969, 0.78871888, -0.33601163)).norm(), 1e-8);
  EXPECT_LT((sp.e_uu - Vec3(0.45571413, -0.85646242, 0.24248043)).norm(), 1e-8);
}

TEST(Splitting, BetaIsRescaledStrongDirection) {
  const Splitting sp = splitting(normalized());
  const Vec2 b = sp.beta();
  EXPECT_NEAR(b[0], 1.879385241571817, 1e-12);
  EXPECT_NEAR(b[1], -3.5320888862379562, 1e-12);
  EXPECT_NEAR(sp.uu_unit_length(), 4.1240442270329307, 1e-12);
  const Vec3 v(b[0], b[1], 1.0);
  EXPECT_LT((normalized().matrix() * v - sp.lambda3 * v).norm(), 1e-12);
  EXPECT_LT((sp.frame() * sp.frame_inverse() - Mat3::Identity()).norm(), 1e-13);
}

double brute_force_constant(const Vec2& beta, int P, std::array<int, 2>* argmin) {
  long double best = 1e300L;
  for (int p1 = -P; p1 <= P; ++p1)
    for (int p2 = -P; p2 <= P; ++p2) {
      const long long r2 = 1LL * p1 * p1 + 1LL * p2 * p2;
      if (r2 == 0 || r2 > 1LL * P * P) continue;
      const long double s = (long double)beta[0] * p1 + (long double)beta[1] * p2;
      const long double d = std::fabs(s - std::nearbyint(s));
      if (d * r2 < best) {
        best = d * r2;
        if (argmin) *argmin = {p1, p2};
      }
    }
  return double(best);
}

TEST(Diophantine, MatchesBruteForceScan) {
  const Splitting sp = splitting(normalized());
  std::array<int, 2> arg{};
  const double oracle = brute_force_constant(sp.beta(), 200, &arg);
  const DiophantineCertificate c = diophantine_constant(sp.beta(), 200);
  EXPECT_NEAR(c.constant_c, oracle, 1e-12);
  EXPECT_NEAR(c.constant_c, 0.07936051321060233, 1e-12);
  EXPECT_EQ(std::abs(c.minimizing_p[0]), 6);
  EXPECT_EQ(std::abs(c.minimizing_p[1]), 7);
  EXPECT_EQ(c.exponent_m, 2);
  EXPECT_EQ(c.search_radius_P, 200);
}

TEST(Diophantine, NonIncreasingInRadius) {
  const Splitting sp = splitting(normalized());
  double prev = std::numeric_limits<double>::infinity();
  for (int P = 1; P <= 60; ++P) {
    const double c = diophantine_constant(sp.beta(), P).constant_c;
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, prev) << "P = " << P;
    prev = c;
  }
}

TEST(Diophantine, RationalVectorIsResonant) {
  try {
    diophantine_constant(Vec2(0.5, 0.25), 10);
    FAIL() << "expected RationalResonance";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RationalResonance);
  }
}

TEST(CriticalRegularity, RatioOfLogs) {
  const auto l = closed_form_lambdas();
  const CriticalRegularity k = critical_regularity(l[1], l[2]);
  EXPECT_EQ(k.kappa, 1);
  EXPECT_NEAR(k.ratio, std::log(l[2]) / std::log(l[1]), 1e-14);
  EXPECT_NEAR(k.ratio, 1.478896547911992, 1e-12);
  EXPECT_FALSE(k.near_integer);
}

}  // namespace
}  // namespace anosov
