#include "anosov/density.hpp"

#include "anosov/errors.hpp"

#include <sstream>

namespace anosov {

namespace {

Mat3 expanding_differential(const TorusMap& f, Bundle which, const Vec3& y) {
  return which == Bundle::Stable ? f.inverse_differential(y) : f.differential(y);
}

double expansion_rate(const Splitting& split, Bundle which) {
  switch (which) {
    case Bundle::Stable: return 1.0 / split.lambda1;
    case Bundle::WeakUnstable: return split.lambda2;
    case Bundle::StrongUnstable: break;
  }
  return split.lambda3;
}

// Lipschitz proxy for log D_W G near p, from differences of DG.
double log_jacobian_lipschitz(const TorusMap& f, Bundle which, const Vec3& p, const Vec3& e) {
  const double delta = 1e-5;
  const Mat3 D0 = expanding_differential(f, which, p);
  const double m = (D0 * e).norm();
  double k = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Mat3 D1 = expanding_differential(f, which, p + delta * Vec3::Unit(i));
    k = std::max(k, (D1 - D0).norm() / delta);
  }
  // Direction-field variation contributes at most the same order again.
  return 4.0 * k / m + 1.0;
}

void check_bound(double bound, const DensityOptions& opts) {
  if (bound > opts.max_error) {
    std::ostringstream os;
    os << "tail bound " << bound << " exceeds " << opts.max_error << " at depth " << opts.depth;
    throw Error(ErrorCode::TruncationBoundExceeded, os.str());
  }
}

DensityEntry chart_density(const Splitting& split, const LeafChart& chart, const Vec3& y,
                           const DensityOptions& opts) {
  const Bundle which = chart.bundle();
  const TorusMap& f = chart.map();
  double off = 0.0;
  const double t = chart.locate(y, 0.0, &off);
  if (off > 1e-8) {
    std::ostringstream os;
    os << "point is " << off << " away from the " << to_string(which) << " leaf";
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
  const LeafChart::Chain cx = chart.chain(0.0);
  const LeafChart::Chain cy = chart.chain(t);
  double log_rho = 0.0;
  for (int j = 1; j <= chart.depth(); ++j) {
    const double dx = cx.tangents[j - 1].norm() / cx.tangents[j].norm();
    const double dy = cy.tangents[j - 1].norm() / cy.tangents[j].norm();
    log_rho += std::log(dx) - std::log(dy);
  }
  const int D = chart.depth();
  const double rate = expansion_rate(split, which);
  const double lip = log_jacobian_lipschitz(f, which, chart.orbit()[D], cx.tangents[D].normalized());
  const double bound = lip * cy.offsets[D].norm() * rate / (rate - 1.0);
  DensityEntry e{y, std::exp(log_rho), bound, D};
  check_bound(bound, opts);
  return e;
}

// Weak unstable leaves have no chart (neither f nor f^{-1} makes them
// dominant), so the product is built level by level: at each backward level
// the wu leaf of x_j is regrown by RK4 up to the transported arclength, and
// the preimage arclength is the integral of |Df^{-1} e| along it.
struct WuSegment {
  Vec3 end;
  double preimage_length;  // arclength of f^{-1}(segment)
};

WuSegment wu_segment(const TorusMap& f, const Splitting& split, const Vec3& x, double S,
                     const DensityOptions& opts) {
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int n = std::max(4, int(std::ceil(std::abs(S) / opts.wu_step)));
  const double h = S / n;
  const Vec3 ref = direction_at(f, split, x, Bundle::WeakUnstable, opts.direction);
  auto dir = [&](const Vec3& p) {
    Vec3 d = direction_at(f, split, p, Bundle::WeakUnstable, opts.direction);
    return d.dot(ref) < 0 ? Vec3(-d) : d;
  };
  auto integrand = [&](const Vec3& p, const Vec3& d) {
    return (f.inverse_differential(p) * d).norm();
  };
  Vec3 p = x;
  Vec3 d = ref;
  double length = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 k1 = d;
    const Vec3 k2 = dir(p + 0.5 * h * k1);
    const Vec3 k3 = dir(p + 0.5 * h * k2);
    const Vec3 k4 = dir(p + h * k3);
    const Vec3 q = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Vec3 dq = dir(q);
    for (int g = 0; g < 3; ++g) {
      const double u = 0.5 * (1.0 + gx[g]);
      const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
      const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
      const Vec3 m = h00 * p + h10 * h * d + h01 * q + h11 * h * dq;
      length += 0.5 * std::abs(h) * gw[g] * integrand(m, dir(m));
    }
    p = q;
    d = dq;
  }
  return {p, S < 0 ? -length : length};
}

double wu_arclength_of(const TorusMap& f, const Splitting& split, const Vec3& x, const Vec3& y,
                       const DensityOptions& opts) {
  const Vec3& y_lift = y;
  const double guess = (y_lift - x).norm();
  GrowOptions g;
  g.direction = opts.direction;
  const LeafCurve leaf = grow_leaf(f, split, x, Bundle::WeakUnstable, 1.2 * guess + 0.05, g);
  // Nearest sample, then Newton on the Hermite interpolant.
  std::size_t best = 0;
  for (std::size_t i = 1; i < leaf.size(); ++i)
    if ((leaf.points[i] - y_lift).norm() < (leaf.points[best] - y_lift).norm()) best = i;
  double s = leaf.arclength[best];
  for (int it = 0; it < 30; ++it) {
    const double ds = 1e-6;
    const Vec3 p = leaf.at(s);
    const Vec3 tang = (leaf.at(s + ds) - leaf.at(s - ds)) / (2 * ds);
    const double step = (y_lift - p).dot(tang) / tang.squaredNorm();
    s += step;
    if (std::abs(step) < 1e-14) break;
  }
  const double off = (leaf.at(s) - y_lift).norm();
  if (off > 1e-7) {
    std::ostringstream os;
    os << "point is " << off << " away from the wu leaf";
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
  return s;
}

DensityEntry wu_density(const TorusMap& f, const Splitting& split, const Vec3& x, const Vec3& y,
                        const DensityOptions& opts) {
  double S = wu_arclength_of(f, split, x, y, opts);
  Vec3 xj = x;
  double log_rho = 0.0;
  WuSegment seg = wu_segment(f, split, xj, S, opts);
  for (int j = 1; j <= opts.depth; ++j) {
    xj = wrap(f.lift_inverse(xj));
    S = seg.preimage_length;
    seg = wu_segment(f, split, xj, S, opts);
    const Vec3 yj = seg.end;
    log_rho += std::log(leaf_jacobian(f, split, xj, Bundle::WeakUnstable, opts.direction)) -
               std::log(leaf_jacobian(f, split, yj, Bundle::WeakUnstable, opts.direction));
  }
  const double rate = split.lambda2;
  const Vec3 e = direction_at(f, split, xj, Bundle::WeakUnstable, opts.direction);
  const double lip = log_jacobian_lipschitz(f, Bundle::WeakUnstable, xj, e);
  const double bound = lip * std::abs(S) * rate / (rate - 1.0);
  DensityEntry out{y, std::exp(log_rho), bound, opts.depth};
  check_bound(bound, opts);
  return out;
}

}  // namespace

double leaf_jacobian(const TorusMap& f, const Splitting& split, const Vec3& y, Bundle which,
                     const DirectionOptions& opts) {
  const Vec3 e = direction_at(f, split, y, which, opts);
  return (expanding_differential(f, which, y) * e).norm();
}

DensityEntry dynamical_density(const TorusMap& f, const Splitting& split, Bundle which,
                               const Vec3& x, const Vec3& y, const DensityOptions& opts) {
  if (torus_distance(x, y) == 0.0) return DensityEntry{y, 1.0, 0.0, opts.depth};
  if (f.is_linear()) return DensityEntry{y, 1.0, 0.0, opts.depth};
  if (which == Bundle::WeakUnstable) return wu_density(f, split, x, y, opts);
  return chart_density(split, LeafChart(f, split, x, which, opts.depth, opts.direction), y, opts);
}

DensityEntry dynamical_density(const Splitting& split, const LeafChart& chart, const Vec3& y,
                               const DensityOptions& opts) {
  if (chart.bundle() == Bundle::WeakUnstable)
    throw Error(ErrorCode::InvalidConfig, "weak unstable densities have no chart form");
  if ((y - chart.base()).norm() == 0.0 || chart.map().is_linear())
    return DensityEntry{y, 1.0, 0.0, chart.depth()};
  return chart_density(split, chart, y, opts);
}

DensityProfile density_profile(const TorusMap& f, const Splitting& split, Bundle which,
                               const Vec3& x, double radius, int count,
                               const DensityOptions& opts) {
  GrowOptions g;
  g.direction = opts.direction;
  const LeafCurve leaf = grow_leaf(f, split, x, which, radius, g);
  DensityProfile prof;
  prof.bundle = which;
  prof.base = x;
  prof.depth = opts.depth;
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : -radius + 2.0 * radius * i / (count - 1);
    const DensityEntry e = dynamical_density(f, split, which, x, leaf.at(s), opts);
    prof.error_bound = std::max(prof.error_bound, e.error_bound);
    prof.samples.push_back(e);
  }
  return prof;
}

double density_cocycle_residual(const TorusMap& f, const Splitting& split, Bundle which,
                                const Vec3& x, const Vec3& y, const DensityOptions& opts) {
  if (which == Bundle::WeakUnstable) {
    const Vec3 gx = f.lift(x);
    const Vec3 gy = gx + f.lift_increment(x, y - x);
    const double lhs = dynamical_density(f, split, which, gx, gy, opts).rho *
                       leaf_jacobian(f, split, y, which, opts.direction);
    const double rhs = leaf_jacobian(f, split, x, which, opts.direction) *
                       dynamical_density(f, split, which, x, y, opts).rho;
    return std::abs(lhs - rhs);
  }
  // G expands the leaves: f for uu, f^{-1} for s.
  const LeafChart chart(f, split, x, which, opts.depth, opts.direction);
  const LeafChart img = chart.image();
  const double t = chart.locate(y);
  const Vec3 gy = img.base() + (which == Bundle::Stable ? f.lift_inverse_increment(x, y - x)
                                                        : f.lift_increment(x, y - x));
  const auto jac = [&](double s) {
    const Vec3 p = chart.point(s);
    return (chart.expanding_differential(p) * chart.unit_tangent(s)).norm();
  };
  const double lhs = dynamical_density(split, img, gy, opts).rho * jac(t);
  const double rhs = jac(0.0) * dynamical_density(split, chart, y, opts).rho;
  return std::abs(lhs - rhs);
}

}  // namespace anosov
