#include "anosov/return_maps.hpp"

#include "anosov/parallel.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace anosov {

namespace {

Vec2 xy(const Vec3& p) { return Vec2(p[0], p[1]); }

Eigen::VectorXd dyn(const Vec2& v) {
  Eigen::VectorXd r(2);
  r << v[0], v[1];
  return r;
}

struct NearestOnPolyline {
  Vec3 point;
  Vec3 tangent;
  std::size_t index = 0;  // segment start
  double distance = 0.0;
};

NearestOnPolyline nearest_on_polyline(const Vec3& p, const std::vector<Vec3>& poly) {
  NearestOnPolyline best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Vec3 d = poly[i + 1] - poly[i];
    const double len2 = d.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - poly[i]).dot(d) / len2, 0.0, 1.0) : 0.0;
    const Vec3 q = poly[i] + t * d;
    const double dist = (p - q).norm();
    if (dist < best.distance) best = {q, d.normalized(), i, dist};
  }
  return best;
}

double level_crossing(const LeafChart& chart, double level, const Vec3& from, double from_t) {
  const double slope = chart.unit_tangent(from_t)[2];
  const double guess = from_t + (level - from[2]) / slope;
  return chart_crossing(chart, level, guess, std::abs(guess - from_t) + kHolonomyWindow);
}

}  // namespace

Vec2 return_map_T(const Splitting& split) { return split.beta(); }

ReturnMapSample return_sample_on_chart(const LeafChart& chart, double t0,
                                       const ConjugacyResult& h, const Splitting& split,
                                       const ReturnOptions& opts, double* t_return) {
  const Vec3 e = split.e_uu.normalized();
  Vec3 p0 = chart.point(t0);
  p0[2] = std::round(p0[2]);
  const double tR = level_crossing(chart, p0[2] + 1.0, p0, t0);
  Vec3 pR = chart.point(tR);
  pR[2] = p0[2] + 1.0;
  const Vec3 d = h.h_inverse(pR) - h.h_inverse(p0);
  const double along = d.dot(e);
  const double perp = (d - along * e).norm();
  if (perp > opts.collinearity_tol * std::max(1.0, std::abs(along))) {
    std::ostringstream os;
    os << "h^{-1} images of x = (" << p0[0] << ", " << p0[1] << ") and its return are "
       << perp << " off a common uu line";
    throw Error(ErrorCode::InverseConjugacyAccuracy, os.str());
  }
  ReturnMapSample s;
  s.x = wrap(xy(p0));
  s.R = wrap(xy(pR));
  s.T = wrap(Vec2(s.x + split.beta()));
  s.A = opts.orientation * along;
  if (t_return) *t_return = tR;
  return s;
}

ReturnMapSample return_map_R(const TorusMap& f, const ConjugacyResult& h, const Splitting& split,
                             const Vec2& x, const ReturnOptions& opts) {
  const LeafChart chart(f, split, Vec3(x[0], x[1], 0.0), Bundle::StrongUnstable,
                        opts.chart_depth);
  return return_sample_on_chart(chart, 0.0, h, split, opts);
}

double pullback_parameter(const ConjugacyResult& h, const Splitting& split, const Vec2& x,
                          const Vec2& xp, double* off_line) {
  const Vec2 w = xy(linear_plane_leaf_direction(split));
  const Vec2 d = torus_delta(quotient_inverse(h, split, xp), quotient_inverse(h, split, x));
  const double r = d.dot(w);
  if (off_line) *off_line = (d - r * w).norm();
  return r;
}

DerivativeEstimate compute_a(const TorusMap& f, const ConjugacyResult& h, const Splitting& split,
                             const Vec2& x, double step, const ReturnOptions& opts) {
  const Vec3 base(x[0], x[1], 0.0);
  const double A0 = return_map_R(f, h, split, x, opts).A;
  auto stencil = [&](double delta) {
    double r[2], A[2];
    for (int k = 0; k < 2; ++k) {
      const double sigma = k == 0 ? -delta : delta;
      const Vec3 p = trace_plane_leaf(f, split, base, sigma, 4);
      const Vec2 xp = wrap(xy(p));
      double off = 0.0;
      r[k] = pullback_parameter(h, split, x, xp, &off);
      if (std::abs(p[2]) > 1e-9 || off > 1e-3 * std::abs(r[k]) + 1e-6 ||
          (k == 0 ? r[k] >= 0 : r[k] <= 0)) {
        std::ostringstream os;
        os << "W stencil point at flat offset " << sigma << " is " << off
           << " off the pullback line (parameter " << r[k] << ")";
        throw Error(ErrorCode::StencilOffLeaf, os.str());
      }
      A[k] = return_map_R(f, h, split, xp, opts).A;
    }
    const double h1 = -r[0], h2 = r[1];
    return -h2 / (h1 * (h1 + h2)) * A[0] + (h2 - h1) / (h1 * h2) * A0 +
           h1 / (h2 * (h1 + h2)) * A[1];
  };
  DerivativeEstimate est;
  est.coarse = stencil(step);
  est.fine = stencil(0.5 * step);
  est.richardson = std::abs(est.fine - est.coarse);
  est.value = est.fine + (est.fine - est.coarse) / 3.0;
  return est;
}

double uu_distance_to_leaf(const LeafChart& chart, double t_from, const LeafCurve& leaf,
                           double t_guess, const ConjugacyResult& h, const Splitting& split,
                           double* t_hit) {
  double t = t_guess;
  const Vec3 start = chart.point(t);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < leaf.size(); ++i)
    if ((leaf.points[i] - start).norm() < (leaf.points[nearest] - start).norm()) nearest = i;
  double s = leaf.arclength[nearest];
  // Gauss-Newton on chart(t) = leaf(s); both curves lie in one unstable leaf.
  double off = 0.0;
  const double ds = 1e-5;
  for (int it = 0; it < 40; ++it) {
    const Vec3 p = chart.point(t);
    const Vec3 q = leaf.at(s);
    const Vec3 qt = (leaf.at(s + ds) - leaf.at(s - ds)) / (2.0 * ds);
    Eigen::Matrix<double, 3, 2> B;
    B.col(0) = chart.velocity(t);
    B.col(1) = -qt;
    const Vec2 step = B.colPivHouseholderQr().solve(q - p);
    t += step[0];
    s += step[1];
    off = (chart.point(t) - leaf.at(s)).norm();
    if (std::abs(step[0]) < 1e-13 && std::abs(step[1]) < 1e-13) break;
  }
  if (off > 1e-6) {
    std::ostringstream os;
    os << "uu chart misses the wu leaf by " << off;
    throw Error(ErrorCode::StencilOffLeaf, os.str());
  }
  if (t_hit) *t_hit = t;
  const Vec3 e = split.e_uu.normalized();
  return (h.h_inverse(chart.point(t)) - h.h_inverse(chart.point(t_from))).dot(e);
}

EquidistanceReport check_equidistance(const TorusMap& f, const ConjugacyResult& h,
                                      const Splitting& split, const Vec2& x0, double y_offset,
                                      double span, int samples, const ReturnOptions& opts) {
  if (samples < 2) throw Error(ErrorCode::InvalidConfig, "need at least two samples");
  const Vec3 base(x0[0], x0[1], 0.0);
  const LeafChart chart0(f, split, base, Bundle::StrongUnstable, opts.chart_depth);
  double tR0 = 0.0;
  return_sample_on_chart(chart0, 0.0, h, split, opts, &tR0);
  const Vec3 y0 = chart0.point(y_offset);
  const Vec3 y0p = chart0.point(tR0 + y_offset);
  const double radius = 4.0 * span + 0.2;
  const LeafCurve leaf0 = grow_leaf(f, split, y0, Bundle::WeakUnstable, radius);
  const LeafCurve leaf1 = grow_leaf(f, split, y0p, Bundle::WeakUnstable, radius);

  EquidistanceReport rep;
  rep.offsets.resize(samples);
  rep.lhs.resize(samples);
  rep.rhs.resize(samples);
  parallel_for(0, std::size_t(samples), [&](std::size_t k) {
    // Shifted off the symmetric stencil so samples differ from any fitting grid.
    const double sigma = -span + 2.0 * span * (double(k) + 0.37) / double(samples);
    const Vec3 xk = trace_plane_leaf(f, split, base, sigma, 8);
    const LeafChart chart(f, split, xk, Bundle::StrongUnstable, opts.chart_depth);
    double tR = 0.0;
    const double A = return_sample_on_chart(chart, 0.0, h, split, opts, &tR).A;
    const double phi0 = uu_distance_to_leaf(chart, 0.0, leaf0, y_offset, h, split);
    const double phi1 =
        uu_distance_to_leaf(chart, tR, leaf1, tR + y_offset, h, split);
    rep.offsets[k] = sigma;
    rep.lhs[k] = opts.orientation * phi1;
    rep.rhs[k] = opts.orientation * phi0 - A;
  });
  double mean = 0.0;
  for (int k = 0; k < samples; ++k) mean += rep.lhs[k] - rep.rhs[k];
  rep.constant = mean / samples;
  for (int k = 0; k < samples; ++k)
    rep.residual = std::max(rep.residual, std::abs(rep.lhs[k] - rep.rhs[k] - rep.constant));
  return rep;
}

double Reconstruction::phi_bar_at(const Vec2& Y) const {
  return phi_mean + phi_bar.evaluate(dyn(Y));
}

Reconstruction reconstruct_phi(const TorusMap& f, const ConjugacyResult& h,
                               const Splitting& split, const Vec2& x0,
                               const ReconstructionOptions& opts) {
  const int sigma = opts.ret.orientation;
  const Vec3 e = split.e_uu.normalized();
  Reconstruction rec;
  rec.x0 = x0;
  rec.w_L = linear_plane_leaf_direction(split);
  const Vec3 c = split.frame_inverse() * rec.w_L;
  rec.a_w = c[1];
  rec.b_w = c[2];
  const Vec2 w = xy(rec.w_L);
  const Vec2 beta = split.beta();

  // Sampling phase: A o h-bar on the L-side grid, one uu chart per node.
  rec.A_bar = ScalarGrid2(opts.M);
  parallel_for(0, rec.A_bar.size(), [&](std::size_t k) {
    const Vec2 Y = rec.A_bar.node(k);
    const Vec3 hy = h.h(Vec3(Y[0], Y[1], 0.0));
    const LeafChart chart(f, split, hy, Bundle::StrongUnstable, opts.ret.chart_depth);
    const double t0 = level_crossing(chart, std::round(hy[2]), hy, 0.0);
    if (std::abs(t0) > kHolonomyWindow)
      throw Error(ErrorCode::HolonomyEscape, "holonomy to the transversal leaves the window");
    rec.A_bar[k] = return_sample_on_chart(chart, t0, h, split, opts.ret).A;
  });

  // Spectral phase.
  const FourierSeries A_fs = FourierSeries::from_grid(rec.A_bar, opts.band);
  rec.a_bar = A_fs.derivative(dyn(w));
  const FourierSeries rhs = rec.a_bar.scaled(-1.0);
  const TranslationSolution sol =
      solve_translation_cohomology(rhs, dyn(beta), opts.divisor_floor, opts.mean_tol);
  rec.phi_bar = sol.phi;
  rec.profile = sol.profile;
  rec.translation_residual = translation_residual(sol.phi, rhs, dyn(beta)).max_abs();
  rec.phi_mean = -sigma * rec.b_w;

  // Antiderivative of phi along W from x0 and the rebuilt graph.
  const Vec3 X0 = h.h_inverse(Vec3(x0[0], x0[1], 0.0));
  const Vec3 Y0_3 = X0 - (X0[2] / e[2]) * e;
  rec.Y0 = xy(Y0_3);
  auto Phi = [&](double r) {
    std::complex<double> acc = 0.0;
    for (const auto& [p, cp] : rec.phi_bar.coefficients()) {
      const double k = p[0] * w[0] + p[1] * w[1];
      const auto base = cp * std::polar(1.0, kTwoPi * (p[0] * rec.Y0[0] + p[1] * rec.Y0[1]));
      if (std::abs(k) < 1e-14)
        acc += base * r;
      else
        acc += base * (std::polar(1.0, kTwoPi * k * r) - 1.0) / std::complex<double>(0.0, kTwoPi * k);
    }
    return rec.phi_mean * r + acc.real();
  };
  auto s_of = [&](const Vec2& Y) {
    const Vec3 hy = h.h(Vec3(Y[0], Y[1], 0.0));
    const HolonomyHit hit = uu_holonomy_hit(f, split, hy);
    return (h.h_inverse(hit.lift) - Vec3(Y[0], Y[1], double(hit.level))).dot(e);
  };

  const double r_max = 1.2 * opts.radius / std::abs(rec.a_w);
  const int n_half = int(std::ceil(r_max / (opts.spacing / std::abs(rec.a_w))));
  const int count = 2 * n_half + 1;
  rec.params.resize(count);
  rec.Phi.resize(count);
  rec.rebuilt.resize(count);
  parallel_for(0, std::size_t(count), [&](std::size_t i) {
    const double r = r_max * (double(int(i) - n_half) / n_half);
    const Vec2 Y = rec.Y0 + r * w;
    const double P = Phi(r);
    const Vec3 X = Vec3(Y[0], Y[1], 0.0) + (s_of(Y) + sigma * P) * e;
    rec.params[i] = r;
    rec.Phi[i] = P;
    rec.rebuilt[i] = h.h(X);
  });

  rec.grown = grow_leaf(f, split, Vec3(x0[0], x0[1], 0.0), Bundle::WeakUnstable, opts.radius);
  // Clipped Hausdorff: the rebuilt graph is longer, so only its points facing
  // the interior of the grown leaf count.
  double d = 0.0;
  for (const Vec3& g : rec.grown.points) d = std::max(d, distance_to_polyline(g, rec.rebuilt));
  const auto& gp = rec.grown.points;
  for (const Vec3& q : rec.rebuilt) {
    const NearestOnPolyline n = nearest_on_polyline(q, gp);
    const bool at_end = (n.index == 0 && (q - gp.front()).norm() <= n.distance + 1e-15) ||
                        (n.index + 2 == gp.size() && (q - gp.back()).norm() <= n.distance + 1e-15);
    if (!at_end) d = std::max(d, n.distance);
  }
  rec.hausdorff = d;
  return rec;
}

HeldOutResiduals held_out_residuals(const TorusMap& f, const ConjugacyResult& h,
                                    const Splitting& split, const Reconstruction& rec,
                                    int samples, std::uint64_t seed, const ReturnOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec2> Ys(samples);
  for (auto& Y : Ys) Y = Vec2(U(rng), U(rng));
  std::vector<double> conj(samples), coh(samples);
  const Vec2 beta = split.beta();
  parallel_for(0, std::size_t(samples), [&](std::size_t k) {
    const Vec2 Y = Ys[k];
    const Vec2 x = quotient_map(h, f, split, Y);
    const ReturnMapSample s = return_map_R(f, h, split, x, opts);
    conj[k] = torus_distance(quotient_map(h, f, split, wrap(Vec2(Y + beta))), s.R);
    const double a = compute_a(f, h, split, x, 0.02, opts).value;
    const double phi_x = rec.phi_bar_at(quotient_inverse(h, split, x));
    const double phi_R = rec.phi_bar_at(quotient_inverse(h, split, s.R));
    coh[k] = std::abs(phi_x - phi_R - a);
  });
  HeldOutResiduals out;
  out.samples = samples;
  out.conjugation = samples ? *std::max_element(conj.begin(), conj.end()) : 0.0;
  out.cohomological = samples ? *std::max_element(coh.begin(), coh.end()) : 0.0;
  return out;
}

}  // namespace anosov
