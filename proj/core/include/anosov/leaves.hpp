#pragma once

#include "anosov/torus_maps.hpp"

#include <vector>

namespace anosov {

struct DirectionOptions {
  double tol = 1e-10;  // angle between two independently started iterates
  int initial_depth = 0;  // 0: derived from the eigenvalue gaps of L
  int max_depth = 400;
};

/// Unit vector spanning E^which_f(x), oriented like the matching eigenvector of L.
/// uu: Df pushed forward along the backward orbit; s: Df^{-1} along the forward
/// orbit; wu: intersection of the unstable plane with the s+wu plane, both
/// tracked through their normal covectors.
Vec3 direction_at(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
                  const DirectionOptions& opts = {});

/// Unit normal covector of E^u_f(x) = E^wu + E^uu.
Vec3 unstable_plane_normal(const TorusMap& f, const Splitting& split, const Vec3& x,
                           const DirectionOptions& opts = {});
/// Unit normal covector of E^s_f(x) + E^wu_f(x).
Vec3 center_stable_plane_normal(const TorusMap& f, const Splitting& split, const Vec3& x,
                                const DirectionOptions& opts = {});

/// Local parameterisation of a strong unstable or stable leaf. The leaf at x
/// is the image under G^depth (G = f for uu, f^{-1} for s) of a short straight
/// segment tangent to the invariant direction at the preimage; increments are
/// pushed with the map's accurate difference operators, so the chart stays
/// precise even though the segment at depth is tiny. The parameter is unit
/// speed at t = 0.
class LeafChart {
 public:
  LeafChart(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
            int depth = 20, const DirectionOptions& opts = {});

  Bundle bundle() const { return which_; }
  const TorusMap& map() const { return *f_; }
  const Vec3& base() const { return orbit_.front(); }
  int depth() const { return int(orbit_.size()) - 1; }

  /// Lifted point at parameter t (near base()).
  Vec3 point(double t) const;
  /// Derivative of point() in t.
  Vec3 velocity(double t) const;
  Vec3 unit_tangent(double t) const { return velocity(t).normalized(); }

  /// Parameter of the chart point closest to y, a lift on the same sheet as
  /// base(); off_leaf receives the residual distance.
  double locate(const Vec3& y, double t0 = 0.0, double* off_leaf = nullptr) const;

  /// Offsets o_j(t) and unit tangents along the preimage chain, level 0 first.
  struct Chain {
    std::vector<Vec3> offsets;
    std::vector<Vec3> tangents;  // unnormalised pushed tangents
  };
  Chain chain(double t) const;

  /// Orbit of the base point the chart hangs from: level j is G^{-j}(x).
  const std::vector<Vec3>& orbit() const { return orbit_; }

  /// Expanding map G at level j (acts from level j to level j-1).
  Mat3 expanding_differential(const Vec3& y) const;

  /// Chart of the same leaf based at point(t), hanging from this chart's
  /// orbit shifted by the chain offsets.
  LeafChart rebased(double t) const;
  /// Chart based at G(base()) one level deeper, with this chart's orbit as
  /// its past. Charts built independently at nearby points follow different
  /// rounded backward orbits; for maps with rough strong bundles their leaves
  /// then disagree far above rounding level, so identities relating a leaf to
  /// its image should go through this.
  LeafChart image() const;

 private:
  LeafChart(const TorusMap& f, Bundle which, std::vector<Vec3> orbit, const Vec3& seed);

  const TorusMap* f_;
  Bundle which_;
  std::vector<Vec3> orbit_;
  Vec3 seed_direction_;
  double scale_ = 1.0;
};

/// Arclength-parameterised polyline along a leaf.
struct LeafCurve {
  Bundle bundle = Bundle::StrongUnstable;
  std::vector<Vec3> points;
  std::vector<double> arclength;  // signed, 0 at the base point
  std::vector<Vec3> tangents;
  std::size_t base_index = 0;

  std::size_t size() const { return points.size(); }
  /// Point at signed arclength s by cubic Hermite interpolation.
  Vec3 at(double s) const;
};

struct GrowOptions {
  double step = 0.01;        // initial arclength step (wu)
  double min_step = 1e-6;    // StepCollapse floor
  double step_tol = 1e-11;   // local error per step (wu)
  double spacing = 0.01;     // sample spacing for chart-based leaves
  int chart_depth = 20;
  DirectionOptions direction{};
};

/// Leaf of the given bundle through x extending radius units of arclength on
/// each side.
LeafCurve grow_leaf(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
                    double radius, const GrowOptions& opts = {});

/// Distance from p to the polyline.
double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& poly);
/// Symmetric Hausdorff distance between two polylines.
double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct HolonomyHit {
  Vec3 lift;        // point on the leaf at an integer height
  double parameter; // chart parameter of the hit
  long level;       // integer height reached
};

inline constexpr double kHolonomyWindow = 2.0;

/// Traces the strong unstable leaf of y to the nearest integer height (the
/// transversal T^2 = {z = 0}); throws HolonomyEscape if that takes more than
/// the window in arclength.
HolonomyHit uu_holonomy_hit(const TorusMap& f, const Splitting& split, const Vec3& y,
                            double window = kHolonomyWindow, int depth = 20,
                            const DirectionOptions& opts = {});
Vec2 uu_holonomy_to_plane(const TorusMap& f, const Splitting& split, const Vec3& y,
                          double window = kHolonomyWindow);

/// Crossing of the chart with height `level`, searched near parameter guess.
double chart_crossing(const LeafChart& chart, double level, double guess, double window);

/// Unit direction of W = T^2 cap W^u_f at x on the plane z = 0, oriented with a
/// positive weak-unstable eigen-component.
Vec3 plane_leaf_direction(const TorusMap& f, const Splitting& split, const Vec3& x,
                          const DirectionOptions& opts = {});
/// Same for L: the line T^2 cap W^u_L.
Vec3 linear_plane_leaf_direction(const Splitting& split);

/// RK4 trace of W from x over flat arclength sigma (signed).
Vec3 trace_plane_leaf(const TorusMap& f, const Splitting& split, const Vec3& x, double sigma,
                      int steps, const DirectionOptions& opts = {});

}  // namespace anosov
