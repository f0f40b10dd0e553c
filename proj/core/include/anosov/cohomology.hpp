#pragma once

#include "anosov/conjugacy.hpp"
#include "anosov/fourier.hpp"
#include "anosov/periodic.hpp"

#include <functional>

namespace anosov {

/// log |Df(x) e^uu_f(x)|.
double uu_log_jacobian(const TorusMap& f, const Splitting& split, const Vec3& x,
                       const DirectionOptions& opts = {});

/// b(x) = log |Df e^uu_f(x)| - log lambda_uu, the strong unstable Jacobian
/// cocycle relative to L.
double uu_jacobian_cocycle(const TorusMap& f, const Splitting& split, const Vec3& x,
                           const DirectionOptions& opts = {});

/// xi(y) = D^uu h^{-1}(y): derivative of the uu eigen-coordinate of h^{-1}
/// along the unit-speed strong unstable leaf of f at y, from symmetric chords
/// of lengths step and step/2 combined by Richardson extrapolation.
double uu_inverse_jacobian(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                           const Vec3& y, double step = 0.02);

struct CoboundaryReport {
  double residual = 0.0;  // sup |log xi(f y) - log xi(y) + b(y)|
  Vec3 worst = Vec3::Zero();
  int samples = 0;
  double max_b = 0.0;     // sup |b|, the size of the right-hand side
};

/// Checks that b is the coboundary of log xi over f on a sample_n^3 cell-centred
/// grid: differentiating h^{-1} o f = L o h^{-1} along uu leaves gives
/// log xi(f y) - log xi(y) = -b(y).
CoboundaryReport verify_anosov_coboundary(const TorusMap& f,
                                          const std::function<double(const Vec3&)>& xi,
                                          const std::function<double(const Vec3&)>& b,
                                          int sample_n);

struct LivsicEntry {
  Vec3 point;
  int period = 0;
  double orbit_sum = 0.0;      // sum of b over the orbit
  double multiplier_gap = 0.0; // log |mu_uu| - n log lambda_uu
};

struct LivsicReport {
  std::vector<LivsicEntry> entries;
  double max_abs_sum = 0.0;
  double tolerance = 1e-6;
  bool vanishes = true;
};

/// Orbit sums of the uu Jacobian cocycle over the refined periodic orbits,
/// with E^uu taken along each orbit as its own past.
LivsicReport livsic_orbit_sums(const TorusMap& f, const Splitting& split,
                               const ObstructionReport& orbits, double tol = 1e-6);

}  // namespace anosov
