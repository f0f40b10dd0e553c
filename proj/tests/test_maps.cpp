#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace anosov {
namespace {

using testing::normalized;

constexpr std::array kBundles{Bundle::Stable, Bundle::WeakUnstable, Bundle::StrongUnstable};

TEST(TrigField, JacobianMatchesFiniteDifference) {
  const TrigPolynomialField u({TrigTerm{{1, -2, 0}, Vec3(0.1, 0.2, -0.3), 0.5},
                               TrigTerm{{0, 1, 3}, Vec3(-0.2, 0.0, 0.4), 0.0}});
  const Vec3 x(0.3, 0.1, 0.8);
  const Mat3 J = u.jacobian(x);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    const Vec3 d = Vec3::Unit(j) * h;
    const Vec3 fd = (u(x + d) - u(x - d)) / (2 * h);
    EXPECT_LT((J.col(j) - fd).norm(), 1e-8);
  }
  const Vec3 dx(1e-9, -2e-9, 3e-9);
  EXPECT_LT((u.increment(x, dx) - J * dx).norm(), 1e-15);
  EXPECT_NEAR(u.c1_norm(), kTwoPi * (std::sqrt(5.0) * Vec3(0.1, 0.2, -0.3).norm() +
                                     std::sqrt(10.0) * Vec3(-0.2, 0.0, 0.4).norm()),
              1e-14);
}

TEST(TorusMaps, InversesRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 3.0);
  const auto conj = testing::conjugated_map(0.02);
  const auto add = testing::additive_map(0.02);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x(U(rng), U(rng), U(rng));
    for (const TorusMap* f : {conj.get(), add.get()}) {
      EXPECT_LT((f->lift_inverse(f->lift(x)) - x).norm(), 1e-12);
      EXPECT_LT((f->lift(f->lift_inverse(x)) - x).norm(), 1e-11);
    }
  }
}

TEST(TorusMaps, LiftIsEquivariant) {
  const auto f = testing::conjugated_map();
  const Vec3 x(0.2, 0.4, 0.7);
  const IVec3 m(1, -2, 3);
  const Vec3 shifted = f->lift(x + m.cast<double>());
  EXPECT_LT((shifted - f->lift(x) - normalized().apply(m).cast<double>()).norm(), 1e-12);
}

TEST(TorusMaps, ConjugatedDifferentialByChainRule) {
  const auto f = testing::conjugated_map(0.05);
  const Vec3 x(0.61, 0.12, 0.33);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    const Vec3 d = Vec3::Unit(j) * h;
    const Vec3 fd = (f->lift(x + d) - f->lift(x - d)) / (2 * h);
    EXPECT_LT((f->differential(x).col(j) - fd).norm(), 1e-7);
  }
}

TEST(Cones, LinearRatesAreEigenvalues) {
  const PerturbedMap f(normalized(), {});
  const Splitting sp = splitting(normalized());
  const ConeReport r = verify_fine_splitting(f, sp, 4);
  EXPECT_NEAR(r.lambda_s, sp.lambda1, 1e-12);
  EXPECT_NEAR(r.lambda_wu_min, sp.lambda2, 1e-12);
  EXPECT_NEAR(r.lambda_wu_max, sp.lambda2, 1e-12);
  EXPECT_NEAR(r.lambda_uu, sp.lambda3, 1e-12);
  EXPECT_LT(r.invariance_margin, 1.0);
  EXPECT_NEAR(r.contraction, 1.0 / sp.lambda2, 1e-12);
}

TEST(Cones, SmallPerturbationsPass) {
  const Splitting sp = splitting(normalized());
  for (const auto& f : {testing::conjugated_map(), testing::additive_map(0.01)}) {
    const ConeReport r = verify_fine_splitting(*f, sp, 8);
    EXPECT_LT(r.invariance_margin, 1.0);
    EXPECT_LT(r.lambda_s, 1.0);
    EXPECT_GT(r.lambda_wu_min, 1.0);
    EXPECT_GT(r.lambda_uu, r.lambda_wu_max);
  }
}

TEST(Cones, LargePerturbationIsRejected) {
  const auto L = normalized();
  const PerturbedMap f(L, TrigPolynomialField::single_mode({0, 0, 1}, Vec3(0.0, 0.0, 0.4)));
  try {
    verify_fine_splitting(f, splitting(L), 8);
    FAIL() << "expected ConeViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConeViolation);
  }
}

TEST(Directions, LinearMapGivesEigenvectors) {
  const PerturbedMap f(normalized(), {});
  const Splitting sp = splitting(normalized());
  for (Bundle b : kBundles) {
    const Vec3 d = direction_at(f, sp, Vec3(0.3, 0.2, 0.9), b);
    EXPECT_LT((d - sp.direction(b)).norm(), 1e-12) << to_string(b);
  }
}

TEST(Directions, ConjugatedMapPushesEigenvectors) {
  // E_f(x) = D phi(phi^{-1} x) E_L for f = phi L phi^{-1}.
  const auto f = testing::conjugated_map(0.03);
  const auto& phi = static_cast<const ConjugatedMap&>(*f).phi();
  const Splitting sp = splitting(normalized());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x(U(rng), U(rng), U(rng));
    for (Bundle b : kBundles) {
      Vec3 oracle = (phi.differential(phi.inverse(x)) * sp.direction(b)).normalized();
      const Vec3 d = direction_at(*f, sp, x, b);
      if (oracle.dot(d) < 0) oracle = -oracle;
      EXPECT_LT((d - oracle).norm(), 1e-9) << to_string(b);
      EXPECT_GT(d.dot(sp.direction(b)), 0.0);
    }
  }
}

TEST(Directions, Equivariance) {
  const auto f = testing::additive_map(0.02);
  const Splitting sp = splitting(normalized());
  const Vec3 x(0.71, 0.05, 0.42);
  for (Bundle b : kBundles) {
    const Vec3 pushed = (f->differential(x) * direction_at(*f, sp, x, b)).normalized();
    const Vec3 there = direction_at(*f, sp, f->evaluate(x), b);
    EXPECT_LT(pushed.cross(there).norm(), 1e-9) << to_string(b);
  }
}

TEST(Leaves, ChartIsInvariant) {
  const auto f = testing::additive_map(0.02);
  const Splitting sp = splitting(normalized());
  const Vec3 x(0.15, 0.55, 0.35);
  const LeafChart here(*f, sp, x, Bundle::StrongUnstable);
  const LeafChart there(*f, sp, f->lift(x), Bundle::StrongUnstable);
  for (double t : {-0.3, -0.05, 0.1, 0.25}) {
    double off = 1.0;
    there.locate(f->lift(here.point(t)), 0.0, &off);
    EXPECT_LT(off, 1e-9) << "t = " << t;
  }
  EXPECT_NEAR(here.velocity(0.0).norm(), 1.0, 1e-12);
}

TEST(Leaves, LinearLeavesAreStraight) {
  const PerturbedMap f(normalized(), {});
  const Splitting sp = splitting(normalized());
  const Vec3 x(0.4, 0.4, 0.4);
  for (Bundle b : kBundles) {
    const LeafCurve c = grow_leaf(f, sp, x, b, 0.5);
    for (std::size_t i = 0; i < c.size(); i += 7)
      EXPECT_LT((c.points[i] - x - c.arclength[i] * sp.direction(b)).norm(), 1e-10)
          << to_string(b);
  }
}

TEST(Leaves, HausdorffDistanceOfShiftedSegments) {
  std::vector<Vec3> a, b;
  for (int i = 0; i <= 100; ++i) {
    a.push_back(Vec3(0.01 * i, 0, 0));
    b.push_back(Vec3(0.01 * i, 0.003, 0));
  }
  EXPECT_NEAR(hausdorff_distance(a, b), 0.003, 1e-15);
  EXPECT_NEAR(distance_to_polyline(Vec3(0.505, 1.0, 0.0), a), 1.0, 1e-15);
}

TEST(Holonomy, LinearClosedForm) {
  const PerturbedMap f(normalized(), {});
  const Splitting sp = splitting(normalized());
  const Vec2 b = sp.beta();
  for (const Vec3 y : {Vec3(0.2, 0.3, 0.4), Vec3(0.9, 0.1, -0.3), Vec3(0.5, 0.5, 0.0)}) {
    const double dz = y[2] - std::round(y[2]);
    const Vec2 expected = wrap(Vec2(y[0] - dz * b[0], y[1] - dz * b[1]));
    EXPECT_LT(torus_distance(uu_holonomy_to_plane(f, sp, y), expected), 1e-12);
  }
}

TEST(Holonomy, FixesTransversalAndIsIdempotent) {
  const auto f = testing::conjugated_map();
  const Splitting sp = splitting(normalized());
  const Vec3 on_plane(0.25, 0.65, 0.0);
  EXPECT_LT(torus_distance(uu_holonomy_to_plane(*f, sp, on_plane), Vec2(0.25, 0.65)), 1e-14);
  const Vec2 once = uu_holonomy_to_plane(*f, sp, Vec3(0.3, 0.8, 0.35));
  const Vec2 twice = uu_holonomy_to_plane(*f, sp, Vec3(once[0], once[1], 0.0));
  EXPECT_LT(torus_distance(once, twice), 1e-12);
}

TEST(Holonomy, EscapesOutsideWindow) {
  const auto f = testing::conjugated_map();
  const Splitting sp = splitting(normalized());
  try {
    uu_holonomy_hit(*f, sp, Vec3(0.1, 0.1, 0.45), 0.5);
    FAIL() << "expected HolonomyEscape";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HolonomyEscape);
  }
}

TEST(PlaneLeaf, LinearDirectionLiesInUnstablePlane) {
  const Splitting sp = splitting(normalized());
  const Vec3 w = linear_plane_leaf_direction(sp);
  EXPECT_NEAR(w[2], 0.0, 1e-15);
  EXPECT_NEAR(w.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(w.dot(sp.e_wu.cross(sp.e_uu).normalized())), 0.0, 1e-14);
  const PerturbedMap f(normalized(), {});
  EXPECT_LT((plane_leaf_direction(f, sp, Vec3(0.3, 0.3, 0.0)) - w).norm(), 1e-12);
}

}  // namespace
}  // namespace anosov
