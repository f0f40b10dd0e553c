#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

namespace anosov {
namespace {

using testing::companion;
using testing::normalized;

// Cofactor determinant on exact integer powers; shares nothing with the library.
std::int64_t det_oracle(const LatticeAutomorphism& L, int n) {
  IMat3 P = IMat3::Identity();
  for (int i = 0; i < n; ++i) P = (P * L.entries()).eval();
  P -= IMat3::Identity();
  const auto& m = P;
  const std::int64_t d = m(0, 0) * m(1, 1) * m(2, 2) + m(0, 1) * m(1, 2) * m(2, 0) +
                         m(0, 2) * m(1, 0) * m(2, 1) - m(0, 2) * m(1, 1) * m(2, 0) -
                         m(0, 1) * m(1, 0) * m(2, 2) - m(0, 0) * m(1, 2) * m(2, 1);
  return std::abs(d);
}

TEST(Periodic, CountsAgainstDeterminant) {
  const std::int64_t companion_counts[] = {1, 3, 19, 51, 181, 513, 1576};
  const std::int64_t normalized_counts[] = {3, 51, 513, 4539, 38553, 322677, 2685504};
  for (int n = 1; n <= 7; ++n) {
    EXPECT_EQ(periodic_point_count(companion(), n), companion_counts[n - 1]);
    EXPECT_EQ(periodic_point_count(normalized(), n), normalized_counts[n - 1]);
    EXPECT_EQ(det_oracle(normalized(), n), normalized_counts[n - 1]);
  }
}

TEST(Periodic, EnumerationSizeMatchesCount) {
  for (int n = 1; n <= 4; ++n) {
    const auto pts = enumerate_linear_periodic(normalized(), n);
    EXPECT_EQ(std::int64_t(pts.size()), det_oracle(normalized(), n));
    const auto L = normalized().power(n);
    for (std::size_t i = 0; i < pts.size(); i += 97) {
      const IVec3 image = L.entries() * pts[i].numerator - pts[i].numerator;
      for (int k = 0; k < 3; ++k) EXPECT_EQ(image[k] % pts[i].denominator, 0);
    }
  }
  EXPECT_EQ(enumerate_linear_periodic(companion(), 1).size(), 1u);
}

TEST(Periodic, SmithFormIsDiagonalAndUnimodular) {
  for (int n = 1; n <= 5; ++n) {
    const IMat3 A = normalized().power(n).entries() - IMat3::Identity();
    const SmithForm s = smith_normal_form(A);
    EXPECT_EQ((s.U * A * s.V).eval(), s.D);
    EXPECT_EQ(std::abs(integer_determinant(s.U)), 1);
    EXPECT_EQ(std::abs(integer_determinant(s.V)), 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) EXPECT_EQ(s.D(i, j), 0);
    EXPECT_EQ(s.D(1, 1) % s.D(0, 0), 0);
    EXPECT_EQ(s.D(2, 2) % s.D(1, 1), 0);
    EXPECT_EQ(s.D(0, 0) * s.D(1, 1) * s.D(2, 2), det_oracle(normalized(), n));
  }
}

TEST(Periodic, OrbitsPartitionMinimalPeriodPoints) {
  // Points of period dividing n split into orbits of minimal period d | n.
  for (int n = 1; n <= 4; ++n) {
    std::int64_t covered = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) covered += std::int64_t(linear_orbits(normalized(), d).size()) * d;
    EXPECT_EQ(covered, det_oracle(normalized(), n));
  }
  EXPECT_EQ(linear_orbits(normalized(), 1).size(), 3u);
  EXPECT_EQ(linear_orbits(normalized(), 2).size(), 24u);  // (51 - 3) / 2
}

TEST(Periodic, OrbitWordsAreLiftDisplacements) {
  for (const auto& o : linear_orbits(normalized(), 3)) {
    const Vec3 x = o.representative.point();
    const Vec3 y = normalized().power(3).matrix() * x;
    EXPECT_LT((y - x - o.word.cast<double>()).norm(), 1e-12);
  }
}

TEST(Periodic, LinearMultipliersArePowers) {
  const auto L = normalized();
  const PerturbedMap f(L, {});
  const Splitting sp = splitting(L);
  const ObstructionReport rep = obstruction_report(f, sp, 3);
  EXPECT_TRUE(rep.verdict);
  EXPECT_LT(rep.max_deviation, 1e-10);
  EXPECT_EQ(rep.entries.size(), 3u + 24u + (513u - 3u) / 3u);
}

TEST(Periodic, ConjugatedMapKeepsMultipliers) {
  const auto f = testing::conjugated_map();
  const Splitting sp = splitting(normalized());
  const ObstructionReport rep = obstruction_report(*f, sp, 2);
  EXPECT_TRUE(rep.verdict);
  EXPECT_LT(rep.max_deviation, 1e-9);
  for (const auto& e : rep.entries) {
    EXPECT_TRUE(e.orbit.real_multipliers);
    EXPECT_LT(e.orbit.cyclic_deviation, 1e-8);
  }
}

TEST(Periodic, AdditivePerturbationMovesMultipliers) {
  const auto f = testing::additive_map(0.05);
  const Splitting sp = splitting(normalized());
  const ObstructionReport rep = obstruction_report(*f, sp, 1);
  EXPECT_FALSE(rep.verdict);
  EXPECT_GT(rep.max_deviation, 1e-3);
  // Refined points are genuinely fixed.
  for (const auto& e : rep.entries) {
    const Vec3 x = e.orbit.point;
    EXPECT_LT((f->lift(x) - x - e.orbit.word.cast<double>()).norm(), 1e-12);
  }
}

TEST(Periodic, CapFollowsCountThreshold) {
  EXPECT_EQ(period_cap(normalized(), 100000), 5);
  EXPECT_EQ(period_cap(normalized(), 513), 3);
  EXPECT_EQ(period_cap(normalized(), 2), 0);
}

}  // namespace
}  // namespace anosov
