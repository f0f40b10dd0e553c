#include "anosov/periodic.hpp"

#include "anosov/errors.hpp"
#include "anosov/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace anosov {

bool RationalPoint::operator<(const RationalPoint& o) const {
  if (denominator != o.denominator) return denominator < o.denominator;
  for (int i = 0; i < 3; ++i)
    if (numerator[i] != o.numerator[i]) return numerator[i] < o.numerator[i];
  return false;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

void swap_rows(IMat3& M, int a, int b) { M.row(a).swap(M.row(b)); }
void swap_cols(IMat3& M, int a, int b) { M.col(a).swap(M.col(b)); }

}  // namespace

SmithForm smith_normal_form(const IMat3& A) {
  IMat3 D = A, U = IMat3::Identity(), V = IMat3::Identity();
  for (int t = 0; t < 3; ++t) {
    for (;;) {
      // Pivot: smallest nonzero |entry| in the trailing block.
      int pr = -1, pc = -1;
      for (int i = t; i < 3; ++i)
        for (int j = t; j < 3; ++j)
          if (D(i, j) != 0 && (pr < 0 || std::abs(D(i, j)) < std::abs(D(pr, pc)))) {
            pr = i;
            pc = j;
          }
      if (pr < 0) return {U, D, V};
      swap_rows(D, t, pr);
      swap_rows(U, t, pr);
      swap_cols(D, t, pc);
      swap_cols(V, t, pc);
      bool clean = true;
      for (int i = t + 1; i < 3; ++i) {
        const std::int64_t q = floor_div(D(i, t), D(t, t));
        D.row(i) -= q * D.row(t);
        U.row(i) -= q * U.row(t);
        if (D(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < 3; ++j) {
        const std::int64_t q = floor_div(D(t, j), D(t, t));
        D.col(j) -= q * D.col(t);
        V.col(j) -= q * V.col(t);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: the pivot must divide the whole trailing block.
      bool divides = true;
      for (int i = t + 1; i < 3 && divides; ++i)
        for (int j = t + 1; j < 3; ++j)
          if (D(i, j) % D(t, t) != 0) {
            D.row(t) += D.row(i);
            U.row(t) += U.row(i);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D(t, t) < 0) {
      D.row(t) *= -1;
      U.row(t) *= -1;
    }
  }
  return {U, D, V};
}

std::int64_t periodic_point_count(const LatticeAutomorphism& L, int n) {
  const IMat3 A = L.power(n).entries() - IMat3::Identity();
  return std::abs(integer_determinant(A));
}

std::vector<RationalPoint> enumerate_linear_periodic(const LatticeAutomorphism& L, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "period must be >= 1");
  const IMat3 A = L.power(n).entries() - IMat3::Identity();
  if (integer_determinant(A) == 0)
    throw Error(ErrorCode::NotHyperbolic, "L^n - I is singular");
  const SmithForm s = smith_normal_form(A);
  // A x in Z^3  <=>  D V^{-1} x in Z^3, so x = V w with w_i in (1/d_i) Z.
  const std::int64_t d1 = s.D(0, 0), d2 = s.D(1, 1), d3 = s.D(2, 2);
  const std::int64_t den = d3;  // d1 | d2 | d3
  std::vector<RationalPoint> out;
  out.reserve(std::size_t(d1 * d2 * d3));
  for (std::int64_t k1 = 0; k1 < d1; ++k1)
    for (std::int64_t k2 = 0; k2 < d2; ++k2)
      for (std::int64_t k3 = 0; k3 < d3; ++k3) {
        const IVec3 w(k1 * (den / d1), k2 * (den / d2), k3);
        IVec3 num = s.V * w;
        for (int i = 0; i < 3; ++i) num[i] = mod(num[i], den);
        // Reduce the fraction to a canonical denominator.
        std::int64_t g = den;
        for (int i = 0; i < 3; ++i) g = std::gcd(g, num[i]);
        RationalPoint p;
        p.denominator = den / g;
        p.numerator = num / g;
        out.push_back(p);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RationalPoint apply(const LatticeAutomorphism& L, const RationalPoint& p) {
  RationalPoint q;
  q.denominator = p.denominator;
  q.numerator = L.entries() * p.numerator;
  for (int i = 0; i < 3; ++i) q.numerator[i] = mod(q.numerator[i], p.denominator);
  return q;
}

std::vector<LinearOrbit> linear_orbits(const LatticeAutomorphism& L, int n) {
  const auto points = enumerate_linear_periodic(L, n);
  std::set<RationalPoint> seen;
  std::vector<LinearOrbit> orbits;
  for (const auto& p : points) {
    if (seen.count(p)) continue;
    std::vector<RationalPoint> orbit{p};
    RationalPoint q = apply(L, p);
    while (!(q == p)) {
      orbit.push_back(q);
      q = apply(L, q);
    }
    for (const auto& o : orbit) seen.insert(o);
    if (int(orbit.size()) != n) continue;
    LinearOrbit lo;
    lo.representative = *std::min_element(orbit.begin(), orbit.end());
    lo.period = n;
    const IVec3 image = L.power(n).entries() * lo.representative.numerator;
    lo.word = (image - lo.representative.numerator) / lo.representative.denominator;
    orbits.push_back(lo);
  }
  return orbits;
}

LiftedIterate lifted_iterate(const TorusMap& f, const Vec3& x, int n) {
  LiftedIterate it;
  const IMat3 L = f.base().entries();
  Vec3 base = x.array().floor();
  it.fractional = x - base;
  it.integer = base.cast<std::int64_t>();
  it.jacobian = Mat3::Identity();
  for (int k = 0; k < n; ++k) {
    const Mat3 D = f.differential(it.fractional);
    it.jacobian = D * it.jacobian;
    it.log_abs_det += std::log(std::abs(D.determinant()));
    const Vec3 z = f.lift(it.fractional);
    const Vec3 s = z.array().floor();
    it.fractional = z - s;
    it.integer = L * it.integer + s.cast<std::int64_t>();
  }
  return it;
}

namespace {

std::array<std::complex<double>, 3> multipliers_of(const LiftedIterate& it, bool& real) {
  Eigen::EigenSolver<Mat3> es(it.jacobian, false);
  std::array<std::complex<double>, 3> ev;
  for (int i = 0; i < 3; ++i) ev[i] = es.eigenvalues()[i];
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  real = true;
  for (auto& z : ev) {
    if (std::abs(z.imag()) < 1e-9 * std::abs(z))
      z = {z.real(), 0.0};
    else
      real = false;
  }
  // The contracting multiplier is tiny next to the others; recover it from
  // the accurately accumulated determinant.
  if (real) {
    const double det_sign = it.jacobian.determinant() < 0 ? -1.0 : 1.0;
    const double rest = ev[1].real() * ev[2].real();
    const double mag = std::exp(it.log_abs_det) / std::abs(rest);
    ev[0] = {det_sign * (rest < 0 ? -1.0 : 1.0) * mag, 0.0};
  }
  return ev;
}

}  // namespace

PeriodicOrbit refine_periodic_point(const TorusMap& f, const Vec3& p0, int n, const IVec3& word,
                                    const NewtonOptions& opts) {
  Vec3 x = p0;
  PeriodicOrbit orb;
  orb.period = n;
  orb.word = word;
  LiftedIterate it;
  for (int step = 0;; ++step) {
    it = lifted_iterate(f, x, n);
    // G = F^n(x) - x - word, evaluated on small numbers.
    const Vec3 xi = x - Vec3(x.array().floor());
    const IVec3 xint = Vec3(x.array().floor()).cast<std::int64_t>();
    const Vec3 G = (it.fractional - xi) + (it.integer - xint - word).cast<double>();
    orb.newton_steps = step;
    if (G.lpNorm<Eigen::Infinity>() < opts.tol) break;
    if (step >= opts.max_steps) {
      std::ostringstream os;
      os << "no convergence after " << step << " Newton steps, |G| = " << G.norm();
      throw Error(ErrorCode::NewtonDiverged, os.str());
    }
    const Mat3 J = it.jacobian - Mat3::Identity();
    if (std::abs(J.determinant()) < 1e-12 * std::max(1.0, J.norm())) {
      throw Error(ErrorCode::SingularJacobian, "D f^n - I is singular at the iterate");
    }
    const Vec3 dx = J.lu().solve(G);
    if (dx.norm() > opts.basin) {
      std::ostringstream os;
      os << "Newton step " << dx.norm() << " leaves the basin guard " << opts.basin;
      throw Error(ErrorCode::NewtonDiverged, os.str());
    }
    x -= dx;
    // Steps at rounding level: G is as small as F^n can be evaluated here.
    if (dx.lpNorm<Eigen::Infinity>() < 1e-14) {
      it = lifted_iterate(f, x, n);
      break;
    }
  }
  orb.point = x;
  orb.multipliers = multipliers_of(it, orb.real_multipliers);

  // Same multipliers from the next point of the orbit.
  bool real2 = true;
  const auto m2 = multipliers_of(lifted_iterate(f, wrap(f.lift(x)), n), real2);
  for (int i = 0; i < 3; ++i)
    orb.cyclic_deviation = std::max(
        orb.cyclic_deviation, std::abs(m2[i] - orb.multipliers[i]) / std::abs(orb.multipliers[i]));
  return orb;
}

int period_cap(const LatticeAutomorphism& L, std::int64_t cap, int hard_max) {
  int n = 0;
  while (n < hard_max && periodic_point_count(L, n + 1) <= cap) ++n;
  return n;
}

ObstructionReport obstruction_report(const TorusMap& f, const Splitting& split, int n_max,
                                     double tol, const NewtonOptions& opts) {
  ObstructionReport rep;
  rep.tolerance = tol;
  rep.max_period = n_max;
  for (int n = 1; n <= n_max; ++n) {
    const auto orbits = linear_orbits(f.base(), n);
    std::vector<ObstructionEntry> entries(orbits.size());
    parallel_for(0, orbits.size(), [&](std::size_t k) {
      ObstructionEntry& e = entries[k];
      e.orbit = refine_periodic_point(f, orbits[k].representative.point(), n, orbits[k].word, opts);
      e.expected = {std::pow(split.lambda1, n), std::pow(split.lambda2, n),
                    std::pow(split.lambda3, n)};
      for (int i = 0; i < 3; ++i)
        e.deviation = std::max(e.deviation,
                               std::abs(e.orbit.multipliers[i] - e.expected[i]) / e.expected[i]);
    });
    for (auto& e : entries) {
      rep.max_deviation = std::max(rep.max_deviation, e.deviation);
      rep.entries.push_back(std::move(e));
    }
  }
  rep.verdict = rep.max_deviation < tol;
  return rep;
}

}  // namespace anosov
