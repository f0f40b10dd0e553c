#pragma once

#include "anosov/leaves.hpp"

namespace anosov {

struct DensityOptions {
  int depth = 20;           // backward levels of the truncated product
  double max_error = 1e-8;  // TruncationBoundExceeded above this
  double wu_step = 0.01;    // arclength step when transporting along wu leaves
  DirectionOptions direction{};
};

struct DensityEntry {
  Vec3 y;
  double rho = 1.0;
  double error_bound = 0.0;
  int depth = 0;
};

struct DensityProfile {
  Bundle bundle = Bundle::StrongUnstable;
  Vec3 base;
  int depth = 0;
  double error_bound = 0.0;
  std::vector<DensityEntry> samples;
};

/// Jacobian of the expanding map along the leaf at y: |Df e| for uu and wu,
/// |Df^{-1} e| for s (whose leaves expand under f^{-1}).
double leaf_jacobian(const TorusMap& f, const Splitting& split, const Vec3& y, Bundle which,
                     const DirectionOptions& opts = {});

/// rho_x(y) = prod_{n>=1} D_W G(G^{-n} x) / D_W G(G^{-n} y), truncated at
/// opts.depth, with an a posteriori tail bound. y is a lift lying on the
/// lifted leaf through x (no reduction mod Z^3 is applied).
DensityEntry dynamical_density(const TorusMap& f, const Splitting& split, Bundle which,
                               const Vec3& x, const Vec3& y, const DensityOptions& opts = {});

/// Same for s and uu leaves, with y located on a given chart of the leaf
/// through chart.base(). Products run along the chart's own orbit.
DensityEntry dynamical_density(const Splitting& split, const LeafChart& chart, const Vec3& y,
                               const DensityOptions& opts = {});

/// Densities at `count` points spread over arclength [-radius, radius].
DensityProfile density_profile(const TorusMap& f, const Splitting& split, Bundle which,
                               const Vec3& x, double radius, int count,
                               const DensityOptions& opts = {});

/// Residual of rho_{G x}(G y) D_W G(y) = D_W G(x) rho_x(y). For s and uu the
/// image side uses LeafChart::image() and the Jacobians use the chart tangent,
/// so both sides follow one orbit.
double density_cocycle_residual(const TorusMap& f, const Splitting& split, Bundle which,
                                const Vec3& x, const Vec3& y, const DensityOptions& opts = {});

}  // namespace anosov
