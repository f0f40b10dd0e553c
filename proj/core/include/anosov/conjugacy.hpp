#pragma once

#include "anosov/grid.hpp"
#include "anosov/leaves.hpp"

#include <functional>
#include <vector>

namespace anosov {

struct ConjugacyOptions {
  int N = 64;              // grid points per axis
  double tol = 1e-8;       // sup residual of h o L - f o h at the nodes
  int max_sweeps = 500;
  Interpolation order = Interpolation::Cubic;
  /// Cell-centred residual above this means the grid cannot represent h.
  double max_offgrid_residual = 1e-2;
  /// Optional non-zero start (amplitude of a seeded random displacement).
  double random_start = 0.0;
  std::uint64_t seed = 1;
};

/// h = id + displacement on the L side; h^{-1} = id + inverse_displacement.
struct ConjugacyResult {
  VectorGrid3 displacement;
  VectorGrid3 inverse_displacement;
  double residual = 0.0;         // node sup-residual
  double offgrid_residual = 0.0; // cell-centred sample
  double inverse_error = 0.0;    // max |h^{-1}(h(x)) - x| at cell centres
  int iterations = 0;
  std::vector<double> residual_log;

  Vec3 h(const Vec3& x) const { return x + displacement(wrap(x)); }
  Vec3 h_inverse(const Vec3& y) const { return y + inverse_displacement(wrap(y)); }
};

/// Jacobi sweeps in the eigen-coordinates of L. Because L is an integer matrix
/// it permutes the nodes (1/N) Z^3 exactly, so the only interpolation happens
/// when h is evaluated off the grid afterwards.
ConjugacyResult solve_conjugacy(const TorusMap& f, const Splitting& split,
                                const ConjugacyOptions& opts = {});

/// sup over the sample_n^3 cell-centred points of |h(Lx) - f(h(x))| on T^3.
double conjugacy_residual(const std::function<Vec3(const Vec3&)>& h, const TorusMap& f,
                          int sample_n);

/// Displacement of h at an arbitrary point, re-solved along a pseudo-orbit
/// segment of length 2 depth + 1 so grid interpolation only enters through the
/// end values, damped by lambda^{-depth}.
Vec3 refined_displacement(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                          const Vec3& x, int depth = 24);

struct DecayReport {
  Bundle bundle = Bundle::Stable;
  std::vector<double> distances;  // d(f^n h y, f^n h x), n >= 0 (or <= 0 for uu)
  int iterates_used = 0;
  double rate = 0.0;              // fitted per-step factor
};

/// Follows h(y), h(x) for y = x + offset e (e the linear leaf direction) forward
/// (stable) or backward (strong unstable) and fits the geometric decay rate.
DecayReport verify_foliation_preservation(const ConjugacyResult& h, const TorusMap& f,
                                          const Splitting& split, const Vec3& x, Bundle which,
                                          double offset = 1e-3, int iterates = 12,
                                          const Vec3* direction = nullptr);

/// h-bar on T^2 as a displacement grid on the L-side transversal.
struct QuotientConjugacy {
  VectorGrid2 displacement;
  Vec2 operator()(const Vec2& Y) const { return wrap(Vec2(Y + displacement(wrap(Y)))); }
};

/// h-bar(Y) for one point: strong unstable holonomy of h(Y, 0) back to z = 0.
Vec2 quotient_map(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                  const Vec2& Y);
QuotientConjugacy quotient_conjugacy(const ConjugacyResult& h, const TorusMap& f,
                                     const Splitting& split, int M);
/// h-bar^{-1}(x): h^{-1}(x, 0) lies on the linear uu line of h-bar^{-1}(x), so
/// projecting along e_uu to z = 0 inverts h-bar in closed form.
Vec2 quotient_inverse(const ConjugacyResult& h, const Splitting& split, const Vec2& x);

struct HolderFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::vector<double> scales;
  std::vector<double> increments;
};

/// Least-squares slope of log |map(x + t dir) - map(x)| against log t.
HolderFit regularity_probe(const std::function<Vec3(const Vec3&)>& map, const Vec3& x,
                           const Vec3& direction, const std::vector<double>& scales,
                           double floor = 1e-13);

/// Logarithmically spaced scales.
std::vector<double> log_scales(double lo, double hi, int count);

}  // namespace anosov
