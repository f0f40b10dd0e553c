#pragma once

#include "anosov/conjugacy.hpp"
#include "anosov/fourier.hpp"

#include <vector>

namespace anosov {

/// First return of the uu-line flow of L from {z = 0} to itself: x -> x + beta.
Vec2 return_map_T(const Splitting& split);

struct ReturnMapSample {
  Vec2 x = Vec2::Zero();
  Vec2 R = Vec2::Zero();
  Vec2 T = Vec2::Zero();
  double A = 0.0;        // pullback uu length from x to R(x)
  double a = 0.0;        // derivative of A along W
  double phi = 0.0;
  double phi_bar = 0.0;  // at h-bar^{-1}(x)
  double a_bar = 0.0;
};

struct ReturnOptions {
  /// +1 follows the uu orientation of e_uu, -1 the reverse; A, a and phi
  /// change sign together.
  int orientation = 1;
  double collinearity_tol = 1e-4;
  int chart_depth = 20;
};

/// R(x) and A(x) for x on the transversal {z = 0}. The pullback length is
/// read off h^{-1}, which maps the f-leaf segment onto a straight L-leaf.
ReturnMapSample return_map_R(const TorusMap& f, const ConjugacyResult& h, const Splitting& split,
                             const Vec2& x, const ReturnOptions& opts = {});

/// Same starting from a chart of the uu leaf through x-tilde at height 0
/// (chart parameter t0).
ReturnMapSample return_sample_on_chart(const LeafChart& chart, double t0,
                                       const ConjugacyResult& h, const Splitting& split,
                                       const ReturnOptions& opts = {},
                                       double* t_return = nullptr);

struct DerivativeEstimate {
  double value = 0.0;
  double coarse = 0.0;      // three-point estimate at the larger step
  double fine = 0.0;        // at half the step
  double richardson = 0.0;  // |fine - coarse|
};

/// a(x): derivative of A along W = T^2 cap W^u_f, arclength measured through
/// h-bar^{-1}; three-point stencils at step and step/2 with Richardson
/// extrapolation.
DerivativeEstimate compute_a(const TorusMap& f, const ConjugacyResult& h, const Splitting& split,
                             const Vec2& x, double step = 0.02, const ReturnOptions& opts = {});

/// Parameter along W in the pullback metric: <h-bar^{-1}(x') - h-bar^{-1}(x), w_L>.
double pullback_parameter(const ConjugacyResult& h, const Splitting& split, const Vec2& x,
                          const Vec2& xp, double* off_line = nullptr);

struct EquidistanceReport {
  std::vector<double> offsets;   // flat W arclength of each sample from x0
  std::vector<double> lhs;       // Phi_{R x0, y0'}(R x)
  std::vector<double> rhs;       // Phi_{x0, y0}(x) - A(x)
  double constant = 0.0;
  double residual = 0.0;         // after removing the best constant
};

/// Equidistance of weak unstable leaves inside an unstable leaf: Phi values
/// come from intersecting uu charts with directly grown wu leaves of y0 (on the
/// uu leaf of x0 at parameter y_offset) and of y0' (same offset past R(x0)).
EquidistanceReport check_equidistance(const TorusMap& f, const ConjugacyResult& h,
                                      const Splitting& split, const Vec2& x0,
                                      double y_offset = 0.3, double span = 0.1, int samples = 9,
                                      const ReturnOptions& opts = {});

/// Signed uu length (pullback metric) from the chart point at t_from to the
/// crossing of the chart with the leaf curve; the crossing parameter is
/// returned through t_hit.
double uu_distance_to_leaf(const LeafChart& chart, double t_from, const LeafCurve& leaf,
                           double t_guess, const ConjugacyResult& h, const Splitting& split,
                           double* t_hit = nullptr);

struct ReconstructionOptions {
  int M = 72;           // sampling grid on the transversal
  int band = 32;        // Euclidean Fourier band
  double radius = 1.0;  // leaf radius compared
  double spacing = 0.01;
  double divisor_floor = 1e-12;
  double mean_tol = 1e-8;
  ReturnOptions ret{};
};

struct Reconstruction {
  Vec2 x0 = Vec2::Zero();        // base point on the transversal
  Vec2 Y0 = Vec2::Zero();        // h-bar^{-1}(x0), lifted
  Vec3 w_L = Vec3::Zero();       // direction of T^2 cap W^u_L
  double a_w = 0.0, b_w = 0.0;   // w_L = a_w e_wu + b_w e_uu
  ScalarGrid2 A_bar;             // A o h-bar on the M x M grid
  FourierSeries a_bar{2};        // band-limited derivative of A_bar along w_L
  FourierSeries phi_bar{2};      // zero-mean part of phi o h-bar
  double phi_mean = 0.0;         // -b_w
  DivisorProfile profile;
  double translation_residual = 0.0;  // max coefficient residual of the solve
  std::vector<double> params;    // r along W
  std::vector<double> Phi;       // rebuilt Phi(r)
  std::vector<Vec3> rebuilt;     // graph over W
  LeafCurve grown;               // wu leaf grown directly
  double hausdorff = 0.0;

  /// phi-bar(Y) including its mean.
  double phi_bar_at(const Vec2& Y) const;
};

/// Samples A, solves the cohomological equation along T and rebuilds the wu
/// leaf of x0 as the graph of the antiderivative of phi.
Reconstruction reconstruct_phi(const TorusMap& f, const ConjugacyResult& h,
                               const Splitting& split, const Vec2& x0,
                               const ReconstructionOptions& opts = {});

struct HeldOutResiduals {
  double conjugation = 0.0;  // |h-bar(T Y) - R(h-bar Y)|
  double cohomological = 0.0;  // |phi(x) - phi(R x) - a(x)|
  int samples = 0;
};

HeldOutResiduals held_out_residuals(const TorusMap& f, const ConjugacyResult& h,
                                    const Splitting& split, const Reconstruction& rec,
                                    int samples, std::uint64_t seed,
                                    const ReturnOptions& opts = {});

}  // namespace anosov
