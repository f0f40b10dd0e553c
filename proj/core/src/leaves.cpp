#include "anosov/leaves.hpp"

#include "anosov/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <sstream>

namespace anosov {

namespace {

enum class Push { VectorForward, VectorBackward, CovectorForward, CovectorBackward };

// Level 0 is x; level j is f^{-j}(x) (backward) or f^j(x) (forward), reduced
// to the fundamental domain so long orbits keep full precision.
void extend_orbit(const TorusMap& f, std::vector<Vec3>& orbit, int depth, bool backward) {
  while (int(orbit.size()) <= depth) {
    const Vec3& last = orbit.back();
    orbit.push_back(wrap(backward ? f.lift_inverse(last) : f.lift(last)));
  }
}

Vec3 push(const TorusMap& f, const std::vector<Vec3>& orbit, Vec3 v, Push kind, int depth) {
  for (int j = depth; j >= 1; --j) {
    switch (kind) {
      case Push::VectorForward: v = f.differential(orbit[j]) * v; break;
      case Push::CovectorForward: v = f.differential(orbit[j]).transpose().lu().solve(v); break;
      case Push::VectorBackward: v = f.differential(orbit[j - 1]).lu().solve(v); break;
      case Push::CovectorBackward: v = f.differential(orbit[j - 1]).transpose() * v; break;
    }
    v.normalize();
  }
  return v;
}

// rate: expected per-step contraction of the angle between the two iterates,
// taken from L; sets the first depth tried when opts.initial_depth is 0.
Vec3 converge(const TorusMap& f, const Vec3& x, Push kind, const Vec3& start_a,
              const Vec3& start_b, double rate, const DirectionOptions& opts,
              const char* what) {
  const bool backward = kind == Push::VectorForward || kind == Push::CovectorForward;
  std::vector<Vec3> orbit{x};
  double angle = 0.0;
  int first = opts.initial_depth;
  if (first <= 0) first = int(std::ceil(std::log(opts.tol) / std::log(rate))) + 6;
  for (int depth = std::max(1, first);; depth *= 2) {
    depth = std::min(depth, opts.max_depth);
    extend_orbit(f, orbit, depth, backward);
    const Vec3 a = push(f, orbit, start_a, kind, depth);
    const Vec3 b = push(f, orbit, start_b, kind, depth);
    angle = std::min(a.cross(b).norm(), a.cross(-b).norm());
    if (angle < opts.tol) return a;
    if (depth == opts.max_depth) break;
  }
  std::ostringstream os;
  os << what << " at (" << x[0] << ", " << x[1] << ", " << x[2] << ") still moves by " << angle
     << " after depth " << opts.max_depth;
  throw Error(ErrorCode::DirectionNotConverged, os.str());
}

Vec3 oriented(Vec3 v, const Vec3& reference) { return v.dot(reference) < 0 ? Vec3(-v) : v; }

Vec3 dual_row(const Splitting& split, int i) {
  return split.frame_inverse().row(i).transpose().normalized();
}

}  // namespace

Vec3 direction_at(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
                  const DirectionOptions& opts) {
  switch (which) {
    case Bundle::StrongUnstable: {
      if (f.is_linear()) return split.e_uu;
      const Vec3 b = (split.e_uu + 0.5 * (split.e_wu + split.e_s)).normalized();
      return oriented(converge(f, x, Push::VectorForward, split.e_uu, b,
                               split.lambda2 / split.lambda3, opts, "E^uu"),
                      split.e_uu);
    }
    case Bundle::Stable: {
      if (f.is_linear()) return split.e_s;
      const Vec3 b = (split.e_s + 0.5 * (split.e_wu + split.e_uu)).normalized();
      return oriented(converge(f, x, Push::VectorBackward, split.e_s, b,
                               split.lambda1 / split.lambda2, opts, "E^s"),
                      split.e_s);
    }
    case Bundle::WeakUnstable: {
      if (f.is_linear()) return split.e_wu;
      const Vec3 n_u = unstable_plane_normal(f, split, x, opts);
      const Vec3 n_cs = center_stable_plane_normal(f, split, x, opts);
      const Vec3 w = n_u.cross(n_cs).normalized();
      return w.dot(split.frame_inverse().row(1).transpose()) < 0 ? Vec3(-w) : w;
    }
  }
  return split.e_uu;
}

Vec3 unstable_plane_normal(const TorusMap& f, const Splitting& split, const Vec3& x,
                           const DirectionOptions& opts) {
  const Vec3 r_s = dual_row(split, 0);
  if (f.is_linear()) return r_s;
  const Vec3 b = (r_s + 0.5 * (dual_row(split, 1) + dual_row(split, 2))).normalized();
  return oriented(converge(f, x, Push::CovectorForward, r_s, b,
                                   split.lambda1 / split.lambda2, opts, "E^u normal"), r_s);
}

Vec3 center_stable_plane_normal(const TorusMap& f, const Splitting& split, const Vec3& x,
                                const DirectionOptions& opts) {
  const Vec3 r_uu = dual_row(split, 2);
  if (f.is_linear()) return r_uu;
  const Vec3 b = (r_uu + 0.5 * (dual_row(split, 0) + dual_row(split, 1))).normalized();
  return oriented(converge(f, x, Push::CovectorBackward, r_uu, b,
                                   split.lambda2 / split.lambda3, opts, "E^s+wu normal"), r_uu);
}

LeafChart::LeafChart(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
                     int depth, const DirectionOptions& opts)
    : f_(&f), which_(which) {
  if (which == Bundle::WeakUnstable)
    throw Error(ErrorCode::InvalidConfig, "leaf charts exist for s and uu leaves only");
  if (depth < 0) throw Error(ErrorCode::InvalidConfig, "chart depth must be >= 0");
  orbit_.push_back(x);
  extend_orbit(f, orbit_, depth, which == Bundle::StrongUnstable);
  seed_direction_ = direction_at(f, split, orbit_.back(), which, opts);
  scale_ = 1.0;
  scale_ = velocity(0.0).norm();
}

LeafChart::LeafChart(const TorusMap& f, Bundle which, std::vector<Vec3> orbit, const Vec3& seed)
    : f_(&f), which_(which), orbit_(std::move(orbit)), seed_direction_(seed) {
  scale_ = 1.0;
  scale_ = velocity(0.0).norm();
}

LeafChart LeafChart::rebased(double t) const {
  const Chain c = chain(t);
  std::vector<Vec3> orbit(orbit_.size());
  for (std::size_t j = 0; j < orbit_.size(); ++j) orbit[j] = orbit_[j] + c.offsets[j];
  return LeafChart(*f_, which_, std::move(orbit), seed_direction_);
}

LeafChart LeafChart::image() const {
  std::vector<Vec3> orbit;
  orbit.reserve(orbit_.size() + 1);
  const Vec3& x = orbit_.front();
  orbit.push_back(which_ == Bundle::StrongUnstable ? f_->lift(x) : f_->lift_inverse(x));
  orbit.insert(orbit.end(), orbit_.begin(), orbit_.end());
  return LeafChart(*f_, which_, std::move(orbit), seed_direction_);
}

LeafChart::Chain LeafChart::chain(double t) const {
  const int D = depth();
  Chain c;
  c.offsets.resize(D + 1);
  c.tangents.resize(D + 1);
  c.offsets[D] = (t / scale_) * seed_direction_;
  c.tangents[D] = seed_direction_ / scale_;
  for (int j = D; j >= 1; --j) {
    const Vec3& b = orbit_[j];
    const Vec3 y = b + c.offsets[j];
    if (which_ == Bundle::StrongUnstable) {
      c.offsets[j - 1] = f_->lift_increment(b, c.offsets[j]);
      c.tangents[j - 1] = f_->differential(y) * c.tangents[j];
    } else {
      c.offsets[j - 1] = f_->lift_inverse_increment(b, c.offsets[j]);
      c.tangents[j - 1] = f_->inverse_differential(y) * c.tangents[j];
    }
  }
  return c;
}

Vec3 LeafChart::point(double t) const {
  if (t == 0.0) return orbit_.front();
  const int D = depth();
  Vec3 o = (t / scale_) * seed_direction_;
  for (int j = D; j >= 1; --j) {
    o = which_ == Bundle::StrongUnstable ? f_->lift_increment(orbit_[j], o)
                                         : f_->lift_inverse_increment(orbit_[j], o);
  }
  return orbit_.front() + o;
}

Vec3 LeafChart::velocity(double t) const { return chain(t).tangents.front(); }

Mat3 LeafChart::expanding_differential(const Vec3& y) const {
  return which_ == Bundle::StrongUnstable ? f_->differential(y) : f_->inverse_differential(y);
}

double LeafChart::locate(const Vec3& y, double t0, double* off_leaf) const {
  const Vec3& target = y;
  double t = t0;
  for (int it = 0; it < 60; ++it) {
    const Chain c = chain(t);
    const Vec3 p = orbit_.front() + c.offsets.front();
    const Vec3& v = c.tangents.front();
    const double dt = (target - p).dot(v) / v.squaredNorm();
    t += dt;
    if (std::abs(dt) <= 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  if (off_leaf) *off_leaf = (target - point(t)).norm();
  return t;
}

Vec3 LeafCurve::at(double s) const {
  if (points.empty()) throw Error(ErrorCode::InvalidConfig, "empty leaf curve");
  if (points.size() == 1) return points.front();
  auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = it == arclength.begin() ? 0 : std::size_t(it - arclength.begin()) - 1;
  i = std::min(i, points.size() - 2);
  const double h = arclength[i + 1] - arclength[i];
  const double u = (s - arclength[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  return h00 * points[i] + h10 * h * tangents[i] + h01 * points[i + 1] + h11 * h * tangents[i + 1];
}

namespace {

LeafCurve grow_from_chart(const TorusMap& f, const Splitting& split, const Vec3& x,
                          Bundle which, double radius, const GrowOptions& opts) {
  const LeafChart chart(f, split, x, which, opts.chart_depth, opts.direction);
  // Gauss-Legendre 3-point arclength of each parameter interval.
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double dt = opts.spacing;

  auto walk = [&](double sign) {
    std::vector<std::pair<Vec3, Vec3>> pts;
    std::vector<double> s_list;
    double s = 0.0, t = 0.0;
    while (s < radius) {
      double len = 0.0;
      for (int q = 0; q < 3; ++q)
        len += gw[q] * chart.velocity(sign * (t + 0.5 * dt * (1.0 + gx[q]))).norm();
      len *= 0.5 * dt;
      t += dt;
      s += len;
      const LeafChart::Chain c = chart.chain(sign * t);
      pts.emplace_back(chart.base() + c.offsets.front(), c.tangents.front().normalized());
      s_list.push_back(sign * s);
      if (t > 10.0 * radius + 10.0)
        throw Error(ErrorCode::StepCollapse, "chart speed collapsed while growing leaf");
    }
    return std::make_pair(pts, s_list);
  };

  auto [fwd, sf] = walk(1.0);
  auto [bwd, sb] = walk(-1.0);
  LeafCurve curve;
  curve.bundle = which;
  for (std::size_t i = bwd.size(); i-- > 0;) {
    curve.points.push_back(bwd[i].first);
    curve.tangents.push_back(bwd[i].second);
    curve.arclength.push_back(sb[i]);
  }
  curve.base_index = curve.points.size();
  curve.points.push_back(x);
  curve.tangents.push_back(chart.unit_tangent(0.0));
  curve.arclength.push_back(0.0);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    curve.points.push_back(fwd[i].first);
    curve.tangents.push_back(fwd[i].second);
    curve.arclength.push_back(sf[i]);
  }
  return curve;
}

struct WuField {
  const TorusMap& f;
  const Splitting& split;
  const DirectionOptions& opts;
  Vec3 operator()(const Vec3& p, const Vec3& prev) const {
    const Vec3 d = direction_at(f, split, p, Bundle::WeakUnstable, opts);
    return d.dot(prev) < 0 ? Vec3(-d) : d;
  }
};

Vec3 rk4_step(const WuField& field, const Vec3& p, const Vec3& d0, double h, Vec3* d_end) {
  const Vec3 k1 = d0;
  const Vec3 k2 = field(p + 0.5 * h * k1, k1);
  const Vec3 k3 = field(p + 0.5 * h * k2, k1);
  const Vec3 k4 = field(p + h * k3, k1);
  const Vec3 q = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (d_end) *d_end = field(q, k1);
  return q;
}

LeafCurve grow_wu(const TorusMap& f, const Splitting& split, const Vec3& x, double radius,
                  const GrowOptions& opts) {
  const WuField field{f, split, opts.direction};
  const Vec3 d0 = direction_at(f, split, x, Bundle::WeakUnstable, opts.direction);

  auto walk = [&](double sign) {
    std::vector<std::pair<Vec3, Vec3>> pts;
    std::vector<double> s_list;
    Vec3 p = x;
    Vec3 d = sign * d0;
    double s = 0.0;
    double h = opts.step;
    while (s < radius - 1e-15) {
      h = std::min(h, radius - s);
      Vec3 d_full, d_half, d_end;
      const Vec3 full = rk4_step(field, p, d, h, &d_full);
      const Vec3 mid = rk4_step(field, p, d, 0.5 * h, &d_half);
      const Vec3 two = rk4_step(field, mid, d_half, 0.5 * h, &d_end);
      const double err = (two - full).norm() / 15.0;
      if (err > opts.step_tol) {
        h *= 0.5;
        if (h < opts.min_step) {
          std::ostringstream os;
          os << "wu leaf step fell below " << opts.min_step << " at arclength " << s;
          throw Error(ErrorCode::StepCollapse, os.str());
        }
        continue;
      }
      p = two + (two - full) / 15.0;
      d = field(p, d_end);
      s += h;
      pts.emplace_back(p, sign * d);
      s_list.push_back(sign * s);
      if (err < 0.1 * opts.step_tol) h = std::min(2.0 * h, 4.0 * opts.step);
    }
    return std::make_pair(pts, s_list);
  };

  auto [fwd, sf] = walk(1.0);
  auto [bwd, sb] = walk(-1.0);
  LeafCurve curve;
  curve.bundle = Bundle::WeakUnstable;
  for (std::size_t i = bwd.size(); i-- > 0;) {
    curve.points.push_back(bwd[i].first);
    curve.tangents.push_back(bwd[i].second);
    curve.arclength.push_back(sb[i]);
  }
  curve.base_index = curve.points.size();
  curve.points.push_back(x);
  curve.tangents.push_back(d0);
  curve.arclength.push_back(0.0);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    curve.points.push_back(fwd[i].first);
    curve.tangents.push_back(fwd[i].second);
    curve.arclength.push_back(sf[i]);
  }
  return curve;
}

}  // namespace

LeafCurve grow_leaf(const TorusMap& f, const Splitting& split, const Vec3& x, Bundle which,
                    double radius, const GrowOptions& opts) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "leaf radius must be positive");
  if (which == Bundle::WeakUnstable) return grow_wu(f, split, x, radius, opts);
  return grow_from_chart(f, split, x, which, radius, opts);
}

double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  double best = (p - poly.front()).norm();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Vec3 a = poly[i], ab = poly[i + 1] - poly[i];
    const double len2 = ab.squaredNorm();
    double u = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    best = std::min(best, (p - a - u * ab).norm());
  }
  return best;
}

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double d = 0.0;
  for (const auto& p : a) d = std::max(d, distance_to_polyline(p, b));
  for (const auto& p : b) d = std::max(d, distance_to_polyline(p, a));
  return d;
}

double chart_crossing(const LeafChart& chart, double level, double guess, double window) {
  auto g = [&](double t) { return chart.point(t)[2] - level; };
  const double g0 = g(guess);
  if (g0 == 0.0) return guess;
  double lo = guess, hi = guess, glo = g0, ghi = g0;
  double delta = 0.02 + 0.05 * std::abs(guess);
  // z grows along the oriented leaf direction (positive third component).
  for (int k = 0; k < 40; ++k) {
    if (g0 > 0) {
      lo = guess - delta;
      glo = g(lo);
      if (glo <= 0) break;
    } else {
      hi = guess + delta;
      ghi = g(hi);
      if (ghi >= 0) break;
    }
    delta *= 2.0;
    if (delta > 4.0 * window + 4.0)
      throw Error(ErrorCode::HolonomyEscape, "leaf never reaches the requested height");
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  boost::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::toms748_solve(
      g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (r.first + r.second);
}

HolonomyHit uu_holonomy_hit(const TorusMap& f, const Splitting& split, const Vec3& y,
                            double window, int depth, const DirectionOptions& opts) {
  const long level = std::lround(y[2]);
  if (y[2] == double(level)) return {y, 0.0, level};
  const LeafChart chart(f, split, y, Bundle::StrongUnstable, depth, opts);
  const double slope = chart.unit_tangent(0.0)[2];
  const double guess = (double(level) - y[2]) / slope;
  if (std::abs(guess) > 1.25 * window) {
    std::ostringstream os;
    os << "uu leaf of (" << y[0] << ", " << y[1] << ", " << y[2] << ") needs about "
       << std::abs(guess) << " arclength to reach the transversal";
    throw Error(ErrorCode::HolonomyEscape, os.str());
  }
  const double t = chart_crossing(chart, double(level), guess, window);
  if (std::abs(t) > window) {
    std::ostringstream os;
    os << "uu crossing at parameter " << t << " lies outside the window " << window;
    throw Error(ErrorCode::HolonomyEscape, os.str());
  }
  Vec3 hit = chart.point(t);
  hit[2] = double(level);
  return {hit, t, level};
}

Vec2 uu_holonomy_to_plane(const TorusMap& f, const Splitting& split, const Vec3& y,
                          double window) {
  const HolonomyHit hit = uu_holonomy_hit(f, split, y, window);
  return wrap(Vec2(hit.lift[0], hit.lift[1]));
}

Vec3 plane_leaf_direction(const TorusMap& f, const Splitting& split, const Vec3& x,
                          const DirectionOptions& opts) {
  const Vec3 n = unstable_plane_normal(f, split, x, opts);
  Vec3 w = n.cross(Vec3::UnitZ()).normalized();
  if (w.dot(split.frame_inverse().row(1).transpose()) < 0) w = -w;
  return w;
}

Vec3 linear_plane_leaf_direction(const Splitting& split) {
  Vec3 w = split.frame_inverse().row(0).transpose().cross(Vec3::UnitZ()).normalized();
  if (w.dot(split.frame_inverse().row(1).transpose()) < 0) w = -w;
  return w;
}

Vec3 trace_plane_leaf(const TorusMap& f, const Splitting& split, const Vec3& x, double sigma,
                      int steps, const DirectionOptions& opts) {
  if (steps < 1) steps = 1;
  const double h = sigma / steps;
  Vec3 p = x;
  auto dir = [&](const Vec3& q) { return plane_leaf_direction(f, split, q, opts); };
  for (int i = 0; i < steps; ++i) {
    const Vec3 k1 = dir(p);
    const Vec3 k2 = dir(p + 0.5 * h * k1);
    const Vec3 k3 = dir(p + 0.5 * h * k2);
    const Vec3 k4 = dir(p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

}  // namespace anosov
