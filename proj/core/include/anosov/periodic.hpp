#pragma once

#include "anosov/torus_maps.hpp"

#include <complex>
#include <vector>

namespace anosov {

/// Point numerator / denominator of T^3 with numerator entries in [0, den).
struct RationalPoint {
  IVec3 numerator = IVec3::Zero();
  std::int64_t denominator = 1;

  Vec3 point() const { return numerator.cast<double>() / double(denominator); }
  bool operator==(const RationalPoint& o) const {
    return denominator == o.denominator && numerator == o.numerator;
  }
  bool operator<(const RationalPoint& o) const;
};

/// Smith normal form U A V = diag(d1, d2, d3) with d1 | d2 | d3.
struct SmithForm {
  IMat3 U, D, V;
};
SmithForm smith_normal_form(const IMat3& A);

/// |det(L^n - I)|, the number of points of period dividing n.
std::int64_t periodic_point_count(const LatticeAutomorphism& L, int n);

/// All x in [0,1)^3 with (L^n - I) x in Z^3, in canonical sorted order.
std::vector<RationalPoint> enumerate_linear_periodic(const LatticeAutomorphism& L, int n);

/// L acting exactly on a rational point.
RationalPoint apply(const LatticeAutomorphism& L, const RationalPoint& p);

struct LinearOrbit {
  RationalPoint representative;  // smallest point of the orbit
  int period = 0;                // minimal period
  IVec3 word = IVec3::Zero();    // L^period x = x + word on the lift
};

/// One representative per L-orbit of minimal period exactly n.
std::vector<LinearOrbit> linear_orbits(const LatticeAutomorphism& L, int n);

struct PeriodicOrbit {
  Vec3 point;
  int period = 0;
  IVec3 word = IVec3::Zero();
  std::array<std::complex<double>, 3> multipliers;  // ascending modulus
  bool real_multipliers = true;
  int newton_steps = 0;
  /// Multipliers recomputed from f(point); equal up to rounding.
  double cyclic_deviation = 0.0;
};

struct NewtonOptions {
  double tol = 1e-13;
  int max_steps = 50;
  double basin = 0.25;  // largest admissible Newton step
};

/// F^n(x) on the lift with the integer part tracked exactly.
struct LiftedIterate {
  Vec3 fractional;  // in [0,1)^3
  IVec3 integer;
  Mat3 jacobian;    // D f^n at x
  double log_abs_det = 0.0;
};
LiftedIterate lifted_iterate(const TorusMap& f, const Vec3& x, int n);

/// Newton on F^n(x) - x - word from a periodic point of L.
PeriodicOrbit refine_periodic_point(const TorusMap& f, const Vec3& p0, int n, const IVec3& word,
                                    const NewtonOptions& opts = {});

struct ObstructionEntry {
  PeriodicOrbit orbit;
  std::array<double, 3> expected;  // lambda_i^n
  double deviation = 0.0;          // max relative deviation
};

struct ObstructionReport {
  std::vector<ObstructionEntry> entries;
  double max_deviation = 0.0;
  double tolerance = 1e-6;
  bool verdict = true;
  int max_period = 0;
};

/// Largest n with |det(L^m - I)| <= cap for all m <= n.
int period_cap(const LatticeAutomorphism& L, std::int64_t cap = 100000, int hard_max = 12);

/// Multipliers of every refined orbit of minimal period n <= n_max compared
/// with {lambda_1^n, lambda_2^n, lambda_3^n} as unordered sets.
ObstructionReport obstruction_report(const TorusMap& f, const Splitting& split, int n_max,
                                     double tol = 1e-6, const NewtonOptions& opts = {});

}  // namespace anosov
