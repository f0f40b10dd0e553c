#include "anosov/conjugacy.hpp"

#include "anosov/errors.hpp"
#include "anosov/parallel.hpp"

#include <random>
#include <sstream>

namespace anosov {

namespace {

std::vector<std::size_t> node_permutation(const VectorGrid3& grid, const IMat3& M) {
  const int N = grid.resolution();
  std::vector<std::size_t> perm(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto idx = grid.unflat(k);
    IVec3 i(idx[0], idx[1], idx[2]);
    const IVec3 j = M * i;
    std::array<int, 3> out;
    for (int d = 0; d < 3; ++d) out[d] = int(((j[d] % N) + N) % N);
    perm[k] = grid.flat(out);
  }
  return perm;
}

Vec3 cell_centre(int i, int j, int k, int n) {
  return Vec3((i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n);
}

}  // namespace

ConjugacyResult solve_conjugacy(const TorusMap& f, const Splitting& split,
                                const ConjugacyOptions& opts) {
  const int N = opts.N;
  if (N < 4 || (N & (N - 1)) != 0)
    throw Error(ErrorCode::InvalidConfig, "conjugacy grid must be a power of two >= 4");
  const Mat3 P = split.frame();
  const Mat3 Pinv = P.inverse();
  const Vec3 lambda(split.lambda1, split.lambda2, split.lambda3);

  ConjugacyResult res;
  res.displacement = VectorGrid3(N, opts.order);
  const std::size_t total = res.displacement.size();
  const auto fwd = node_permutation(res.displacement, f.base().entries());
  const auto bwd = node_permutation(res.displacement, f.base().inverse().entries());

  // Eigen-coordinates of the displacement.
  std::vector<Vec3> c(total, Vec3::Zero()), next(total), g(total);
  if (opts.random_start > 0.0) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> U(-opts.random_start, opts.random_start);
    for (auto& v : c) v = Pinv * Vec3(U(rng), U(rng), U(rng));
  }

  for (int sweep = 0;; ++sweep) {
    parallel_for(0, total, [&](std::size_t k) {
      const Vec3 x = res.displacement.node(k);
      g[k] = Pinv * f.displacement(x + P * c[k]);
    });
    double r = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      const Vec3 e = c[fwd[k]] - lambda.cwiseProduct(c[k]) - g[k];
      r = std::max(r, (P * e).norm());
    }
    res.residual_log.push_back(r);
    res.residual = r;
    res.iterations = sweep;
    if (r < opts.tol) break;
    if (sweep >= opts.max_sweeps) {
      std::ostringstream os;
      os << "residual " << r << " after " << sweep << " sweeps";
      throw Error(ErrorCode::NoConvergence, os.str());
    }
    parallel_for(0, total, [&](std::size_t k) {
      Vec3 v;
      v[0] = lambda[0] * c[bwd[k]][0] + g[bwd[k]][0];
      v[1] = (c[fwd[k]][1] - g[k][1]) / lambda[1];
      v[2] = (c[fwd[k]][2] - g[k][2]) / lambda[2];
      next[k] = v;
    });
    c.swap(next);
  }

  for (std::size_t k = 0; k < total; ++k) res.displacement[k] = P * c[k];

  // h^{-1} at the nodes: X + u(X) = y by fixed-point iteration on the
  // interpolated displacement, damped if the plain iteration stalls.
  res.inverse_displacement = VectorGrid3(N, opts.order);
  const VectorGrid3& u = res.displacement;
  std::vector<int> failed(total, 0);
  parallel_for(0, total, [&](std::size_t k) {
    const Vec3 y = u.node(k);
    Vec3 X = y - u[k];
    double omega = 1.0;
    double last = std::numeric_limits<double>::infinity();
    bool ok = false;
    for (int it = 0; it < 400; ++it) {
      const Vec3 next_X = y - u(wrap(X));
      const Vec3 step = next_X - X;
      X += omega * step;
      const double s = step.norm();
      if (s < 1e-14) {
        ok = true;
        break;
      }
      if (s > 0.9 * last) omega = std::max(0.05, 0.5 * omega);
      last = s;
    }
    failed[k] = ok ? 0 : 1;
    res.inverse_displacement[k] = X - y;
  });
  for (std::size_t k = 0; k < total; ++k) {
    if (failed[k]) {
      const Vec3 y = u.node(k);
      std::ostringstream os;
      os << "inverting h failed at node (" << y[0] << ", " << y[1] << ", " << y[2] << ")";
      throw Error(ErrorCode::NotInvertible, os.str());
    }
  }

  const int S = std::max(4, N / 2);
  res.offgrid_residual = conjugacy_residual([&](const Vec3& x) { return res.h(x); }, f, S);
  double inv = 0.0;
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j)
      for (int k = 0; k < S; ++k) {
        const Vec3 x = cell_centre(i, j, k, S);
        inv = std::max(inv, torus_distance(res.h_inverse(res.h(x)), x));
      }
  res.inverse_error = inv;
  if (res.offgrid_residual > opts.max_offgrid_residual) {
    std::ostringstream os;
    os << "off-grid residual " << res.offgrid_residual << " at N = " << N;
    throw Error(ErrorCode::ResolutionTooCoarse, os.str());
  }
  return res;
}

double conjugacy_residual(const std::function<Vec3(const Vec3&)>& h, const TorusMap& f,
                          int sample_n) {
  const Mat3 L = f.base().matrix();
  const std::size_t total = std::size_t(sample_n) * sample_n * sample_n;
  std::vector<double> r(total, 0.0);
  parallel_for(0, total, [&](std::size_t idx) {
    const int i = int(idx / (std::size_t(sample_n) * sample_n));
    const int j = int((idx / sample_n) % sample_n);
    const int k = int(idx % sample_n);
    const Vec3 x = cell_centre(i, j, k, sample_n);
    r[idx] = torus_distance(h(wrap(Vec3(L * x))), f.lift(h(x)));
  });
  return *std::max_element(r.begin(), r.end());
}

Vec3 refined_displacement(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                          const Vec3& x, int depth) {
  if (f.is_linear()) return Vec3::Zero();
  const Mat3 P = split.frame();
  const Mat3 Pinv = P.inverse();
  const Mat3 L = f.base().matrix();
  const Mat3 Linv = f.base().inverse().matrix();
  const int K = depth;
  const int n = 2 * K + 1;
  // Pseudo-orbit y_k = L^k x, k = -K..K, reduced mod 1 at every step.
  std::vector<Vec3> y(n), c(n), g(n);
  y[K] = x;
  for (int k = K + 1; k < n; ++k) y[k] = wrap(Vec3(L * y[k - 1]));
  for (int k = K - 1; k >= 0; --k) y[k] = wrap(Vec3(Linv * y[k + 1]));
  for (int k = 0; k < n; ++k) c[k] = Pinv * h.displacement(wrap(y[k]));

  for (int it = 0; it < 200; ++it) {
    for (int k = 0; k < n; ++k) g[k] = Pinv * f.displacement(y[k] + P * c[k]);
    double change = 0.0;
    for (int k = n - 2; k >= 0; --k) {
      for (int i = 1; i < 3; ++i) {
        const double v = (c[k + 1][i] - g[k][i]) / (i == 1 ? split.lambda2 : split.lambda3);
        change = std::max(change, std::abs(v - c[k][i]));
        c[k][i] = v;
      }
    }
    for (int k = 1; k < n; ++k) {
      const double v = split.lambda1 * c[k - 1][0] + g[k - 1][0];
      change = std::max(change, std::abs(v - c[k][0]));
      c[k][0] = v;
    }
    if (change < 1e-16) break;
  }
  return P * c[K];
}

DecayReport verify_foliation_preservation(const ConjugacyResult& h, const TorusMap& f,
                                          const Splitting& split, const Vec3& x, Bundle which,
                                          double offset, int iterates, const Vec3* direction) {
  if (which == Bundle::WeakUnstable)
    throw Error(ErrorCode::InvalidConfig, "foliation preservation is checked for s and uu");
  const bool forward = which == Bundle::Stable;
  const Vec3 e = direction ? *direction : split.direction(which);
  const Vec3 y = x + offset * e;
  Vec3 p = x + refined_displacement(h, f, split, x);
  Vec3 d = (y + refined_displacement(h, f, split, y)) - p;

  DecayReport rep;
  rep.bundle = which;
  rep.distances.push_back(d.norm());
  for (int n = 1; n <= iterates; ++n) {
    if (forward) {
      d = f.lift_increment(p, d);
      p = wrap(f.lift(p));
    } else {
      d = f.lift_inverse_increment(p, d);
      p = wrap(f.lift_inverse(p));
    }
    rep.distances.push_back(d.norm());
  }
  // Fit only while the distance keeps shrinking and stays within four decades
  // of the start; below that the rounding error in the off-leaf directions,
  // amplified at the opposite rate, competes with the on-leaf signal.
  int used = 1;
  while (used < int(rep.distances.size()) && rep.distances[used] < rep.distances[used - 1] &&
         rep.distances[used] > 1e-4 * rep.distances[0])
    ++used;
  if (used < 3) {
    std::ostringstream os;
    os << "distance grows at iterate " << used << ": " << rep.distances[used - 1] << " -> "
       << (used < int(rep.distances.size()) ? rep.distances[used] : 0.0);
    throw Error(ErrorCode::NoDecay, os.str());
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = 0; n < used; ++n) {
    const double ly = std::log(rep.distances[n]);
    sx += n;
    sy += ly;
    sxx += double(n) * n;
    sxy += n * ly;
  }
  const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  rep.iterates_used = used;
  rep.rate = std::exp(slope);
  return rep;
}

Vec2 quotient_map(const ConjugacyResult& h, const TorusMap& f, const Splitting& split,
                  const Vec2& Y) {
  const Vec3 base(Y[0], Y[1], 0.0);
  const Vec3 hy = base + h.displacement(wrap(base));
  return uu_holonomy_to_plane(f, split, hy);
}

QuotientConjugacy quotient_conjugacy(const ConjugacyResult& h, const TorusMap& f,
                                     const Splitting& split, int M) {
  QuotientConjugacy q{VectorGrid2(M, Interpolation::Cubic)};
  parallel_for(0, q.displacement.size(), [&](std::size_t k) {
    const Vec2 Y = q.displacement.node(k);
    q.displacement[k] = torus_delta(quotient_map(h, f, split, Y), Y);
  });
  return q;
}

Vec2 quotient_inverse(const ConjugacyResult& h, const Splitting& split, const Vec2& x) {
  const Vec3 X = h.h_inverse(Vec3(x[0], x[1], 0.0));
  const Vec3 Y = X - (X[2] / split.e_uu[2]) * split.e_uu;
  return wrap(Vec2(Y[0], Y[1]));
}

HolderFit regularity_probe(const std::function<Vec3(const Vec3&)>& map, const Vec3& x,
                           const Vec3& direction, const std::vector<double>& scales,
                           double floor) {
  if (scales.size() < 2)
    throw Error(ErrorCode::DegenerateFit, "need at least two scales");
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  if (*hi / *lo < 999.0)
    throw Error(ErrorCode::DegenerateFit, "scales must span at least three decades");
  HolderFit fit;
  fit.scales = scales;
  const Vec3 base = map(x);
  const Vec3 e = direction.normalized();
  for (double t : scales) {
    const double inc = (map(x + t * e) - base).norm();
    if (!(inc > floor)) {
      std::ostringstream os;
      os << "increment " << inc << " at scale " << t << " is at the resolution floor";
      throw Error(ErrorCode::DegenerateFit, os.str());
    }
    fit.increments.push_back(inc);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double lx = std::log(scales[i]), ly = std::log(fit.increments[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.exponent * sx) / n;
  return fit;
}

std::vector<double> log_scales(double lo, double hi, int count) {
  std::vector<double> s;
  for (int i = 0; i < count; ++i)
    s.push_back(lo * std::pow(hi / lo, count == 1 ? 0.0 : double(i) / (count - 1)));
  return s;
}

}  // namespace anosov
