#pragma once

#include "anosov/torus_maps.hpp"

namespace anosov {

/// Constants verified on a sample grid. Cones live in the eigen-coordinates
/// of L: a vector cone around direction i is {|c_j| <= aperture |c_i|, j != i};
/// a plane is tracked through its normal covector.
struct ConeReport {
  double aperture = 1.0;
  int grid_n = 0;
  /// Worst one-step rates over the grid. At u = 0 these equal the eigenvalues.
  double lambda_s = 0.0;      // max contraction of the stable cone under Df
  double lambda_wu_min = 0.0;  // range of weak expansion on the weak cone
  double lambda_wu_max = 0.0;
  double lambda_uu = 0.0;     // min expansion of the strong unstable cone
  /// Largest ratio |image aperture| / aperture over all four cones; < 1 means
  /// strict invariance.
  double invariance_margin = 0.0;
  /// Contraction factor in (0,1) and constant C of the Anosov estimate
  /// ||Df^n v|| <= C lambda^n ||v|| on the stable cone (and the reverse on the
  /// unstable cones). C comes from switching between the adapted and flat norms.
  double contraction = 0.0;
  double constant_C = 0.0;
};

ConeReport verify_fine_splitting(const TorusMap& f, const Splitting& split, int grid_n,
                                 double aperture = 1.0);

}  // namespace anosov
