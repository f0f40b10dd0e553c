#include "anosov/cohomology.hpp"

#include "anosov/parallel.hpp"

#include <algorithm>

namespace anosov {

double uu_log_jacobian(const TorusMap& f, const Splitting& split, const Vec3& x,
                       const DirectionOptions& opts) {
  const Vec3 e = direction_at(f, split, x, Bundle::StrongUnstable, opts);
  return std::log((f.differential(x) * e).norm());
}

double uu_jacobian_cocycle(const TorusMap& f, const Splitting& split, const Vec3& x,
                           const DirectionOptions& opts) {
  return uu_log_jacobian(f, split, x, opts) - std::log(split.lambda3);
}

double uu_inverse_jacobian(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                           const Vec3& y, double step) {
  const Vec3 e_uu = split.e_uu.normalized();
  if (f.is_linear()) return 1.0;
  const LeafChart chart(f, split, y, Bundle::StrongUnstable);
  const Vec3 base = chart.point(0.0);
  auto coordinate = [&](double t) {
    const Vec3 p = chart.point(t);
    // Offset from the base before wrapping keeps the chord continuous.
    return (p - base + h.inverse_displacement(wrap(p))).dot(e_uu);
  };
  auto chord = [&](double d) { return (coordinate(d) - coordinate(-d)) / (2.0 * d); };
  return (4.0 * chord(0.5 * step) - chord(step)) / 3.0;
}

CoboundaryReport verify_anosov_coboundary(const TorusMap& f,
                                          const std::function<double(const Vec3&)>& xi,
                                          const std::function<double(const Vec3&)>& b,
                                          int sample_n) {
  if (sample_n < 1) throw Error(ErrorCode::InvalidConfig, "sample count must be >= 1");
  const std::size_t total = std::size_t(sample_n) * sample_n * sample_n;
  std::vector<double> res(total), bs(total);
  parallel_for(0, total, [&](std::size_t idx) {
    const int i = int(idx / (std::size_t(sample_n) * sample_n));
    const int j = int((idx / sample_n) % sample_n);
    const int k = int(idx % sample_n);
    const Vec3 y((i + 0.5) / sample_n, (j + 0.5) / sample_n, (k + 0.5) / sample_n);
    const double by = b(y);
    bs[idx] = std::abs(by);
    res[idx] = std::abs(std::log(xi(f.evaluate(y))) - std::log(xi(y)) + by);
  });
  CoboundaryReport rep;
  rep.samples = int(total);
  const auto it = std::max_element(res.begin(), res.end());
  rep.residual = *it;
  const std::size_t w = std::size_t(it - res.begin());
  rep.worst = Vec3((double(w / (std::size_t(sample_n) * sample_n)) + 0.5) / sample_n,
                   (double((w / sample_n) % sample_n) + 0.5) / sample_n,
                   (double(w % sample_n) + 0.5) / sample_n);
  rep.max_b = *std::max_element(bs.begin(), bs.end());
  return rep;
}

namespace {

// E^uu along a periodic orbit: its past is the orbit itself, so the direction
// at the first point is the limit of Df^n pushed around the cycle. Iterating
// f^{-1} from a rounded periodic point instead drifts off the orbit along E^s.
std::vector<Vec3> periodic_uu_directions(const TorusMap& f, const Splitting& split,
                                         const std::vector<Vec3>& cycle) {
  const int n = int(cycle.size());
  Vec3 e = split.e_uu;
  for (int sweep = 0; sweep < 400; ++sweep) {
    const Vec3 prev = e;
    for (int k = 0; k < n; ++k) e = (f.differential(cycle[k]) * e).normalized();
    if (e.dot(split.e_uu) < 0) e = -e;
    if ((e - prev).norm() < 1e-15) break;
  }
  std::vector<Vec3> out(n);
  out[0] = e;
  for (int k = 1; k < n; ++k) out[k] = (f.differential(cycle[k - 1]) * out[k - 1]).normalized();
  return out;
}

}  // namespace

LivsicReport livsic_orbit_sums(const TorusMap& f, const Splitting& split,
                               const ObstructionReport& orbits, double tol) {
  LivsicReport rep;
  rep.tolerance = tol;
  rep.entries.resize(orbits.entries.size());
  parallel_for(0, orbits.entries.size(), [&](std::size_t idx) {
    const PeriodicOrbit& o = orbits.entries[idx].orbit;
    LivsicEntry e;
    e.point = o.point;
    e.period = o.period;
    std::vector<Vec3> cycle{o.point};
    for (int k = 1; k < o.period; ++k) cycle.push_back(f.lift(cycle.back()));
    const std::vector<Vec3> dirs =
        f.is_linear() ? std::vector<Vec3>(cycle.size(), split.e_uu)
                      : periodic_uu_directions(f, split, cycle);
    for (int k = 0; k < o.period; ++k)
      e.orbit_sum += std::log((f.differential(cycle[k]) * dirs[k]).norm()) - std::log(split.lambda3);
    e.multiplier_gap = std::log(std::abs(o.multipliers[2])) - o.period * std::log(split.lambda3);
    rep.entries[idx] = e;
  });
  for (const auto& e : rep.entries) rep.max_abs_sum = std::max(rep.max_abs_sum, std::abs(e.orbit_sum));
  rep.vanishes = rep.max_abs_sum <= tol;
  return rep;
}

}  // namespace anosov
