#include "anosov/torus_maps.hpp"

#include "anosov/errors.hpp"

#include <sstream>

namespace anosov {

namespace {

double phase_of(const TrigTerm& t, const Vec3& x) {
  return kTwoPi * (t.frequency[0] * x[0] + t.frequency[1] * x[1] + t.frequency[2] * x[2]) +
         t.phase;
}

double knorm(const TrigTerm& t) {
  return std::sqrt(double(t.frequency[0]) * t.frequency[0] +
                   double(t.frequency[1]) * t.frequency[1] +
                   double(t.frequency[2]) * t.frequency[2]);
}

}  // namespace

Vec3 TrigPolynomialField::operator()(const Vec3& x) const {
  Vec3 v = Vec3::Zero();
  for (const auto& t : terms_) v += t.coefficient * std::sin(phase_of(t, x));
  return v;
}

Mat3 TrigPolynomialField::jacobian(const Vec3& x) const {
  Mat3 J = Mat3::Zero();
  for (const auto& t : terms_) {
    const double c = kTwoPi * std::cos(phase_of(t, x));
    for (int j = 0; j < 3; ++j) J.col(j) += t.coefficient * (c * t.frequency[j]);
  }
  return J;
}

Vec3 TrigPolynomialField::increment(const Vec3& x, const Vec3& dx) const {
  Vec3 v = Vec3::Zero();
  for (const auto& t : terms_) {
    const double a = phase_of(t, x);
    const double d = kTwoPi * (t.frequency[0] * dx[0] + t.frequency[1] * dx[1] +
                               t.frequency[2] * dx[2]);
    // sin(a + d) - sin(a) = 2 cos(a + d/2) sin(d/2)
    v += t.coefficient * (2.0 * std::cos(a + 0.5 * d) * std::sin(0.5 * d));
  }
  return v;
}

double TrigPolynomialField::c0_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coefficient.norm();
  return s;
}

double TrigPolynomialField::c1_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += kTwoPi * knorm(t) * t.coefficient.norm();
  return s;
}

TrigPolynomialField TrigPolynomialField::scaled(double s) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= s;
  return TrigPolynomialField(std::move(terms));
}

TrigPolynomialField TrigPolynomialField::operator+(const TrigPolynomialField& o) const {
  auto terms = terms_;
  terms.insert(terms.end(), o.terms_.begin(), o.terms_.end());
  return TrigPolynomialField(std::move(terms));
}

Vec3 TorusMap::lift_increment(const Vec3& x, const Vec3& dx) const {
  return lift(x + dx) - lift(x);
}

Vec3 TorusMap::lift_inverse_increment(const Vec3& y, const Vec3& dy) const {
  return lift_inverse(y + dy) - lift_inverse(y);
}

PerturbedMap::PerturbedMap(LatticeAutomorphism L, TrigPolynomialField u)
    : L_(std::move(L)),
      u_(std::move(u)),
      Lm_(L_.matrix()),
      Linv_(L_.inverse().matrix()),
      c1_size_(std::max(u_.c0_norm(), u_.c1_norm())) {
  linear_ = u_.empty() || c1_size_ == 0.0;
}

Vec3 PerturbedMap::lift(const Vec3& x) const { return Lm_ * x + u_(x); }

Mat3 PerturbedMap::differential(const Vec3& x) const { return Lm_ + u_.jacobian(x); }

Vec3 PerturbedMap::lift_increment(const Vec3& x, const Vec3& dx) const {
  return Lm_ * dx + u_.increment(x, dx);
}

Vec3 PerturbedMap::lift_inverse(const Vec3& y) const {
  Vec3 x = Linv_ * y;
  if (linear_) return x;
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  Vec3 r = lift(x) - y;
  for (int it = 0; it < 60; ++it) {
    const Vec3 step = differential(x).lu().solve(r);
    // Backtrack so the residual never grows; u is only C^1-small, and the
    // strongly contracting direction of L^{-1} makes plain Newton overshoot.
    double t = 1.0;
    Vec3 trial = x - step;
    Vec3 r_trial = lift(trial) - y;
    while (r_trial.norm() > r.norm() && t > 1.0 / 64) {
      t *= 0.5;
      trial = x - t * step;
      r_trial = lift(trial) - y;
    }
    if (step.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
      // Quadratic convergence: the full step lands at rounding level, where
      // residual comparisons are noise.
      return x - step;
    }
    x = trial;
    r = r_trial;
  }
  throw Error(ErrorCode::NotInvertible, "Newton inversion of f did not converge");
}

Vec3 PerturbedMap::lift_inverse_increment(const Vec3& y, const Vec3& dy) const {
  if (linear_) return Linv_ * dy;
  const Vec3 x = lift_inverse(y);
  Vec3 dx = Linv_ * dy;
  const double scale = dy.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return dx;
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = lift_increment(x, dx) - dy;
    const Vec3 step = differential(x + dx).lu().solve(r);
    dx -= step;
    if (step.lpNorm<Eigen::Infinity>() <= 1e-16 * scale) break;
  }
  return dx;
}

NearIdentityDiffeo::NearIdentityDiffeo(TrigPolynomialField psi) : psi_(std::move(psi)) {
  if (psi_.c1_norm() >= 1.0) {
    std::ostringstream os;
    os << "C1 size " << psi_.c1_norm() << " of the displacement is not below 1";
    throw Error(ErrorCode::NotInvertible, os.str());
  }
}

Vec3 NearIdentityDiffeo::inverse(const Vec3& y) const {
  Vec3 x = y;
  for (int it = 0; it < 200; ++it) {
    const Vec3 next = y - psi_(x);
    const double step = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (step <= 1e-12 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
      // The fixed-point residual is now below tolerance; a couple more sweeps
      // bring it to rounding level at negligible cost.
      for (int k = 0; k < 3; ++k) x = y - psi_(x);
      return x;
    }
  }
  throw Error(ErrorCode::NotInvertible, "fixed-point inversion of id + psi did not converge");
}

Vec3 NearIdentityDiffeo::inverse_increment(const Vec3& y, const Vec3& dy) const {
  const Vec3 x = inverse(y);
  Vec3 dx = dy;
  const double scale = dy.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 200; ++it) {
    const Vec3 next = dy - psi_.increment(x, dx);
    const double step = (next - dx).lpNorm<Eigen::Infinity>();
    dx = next;
    if (step <= 1e-16 * scale) break;
  }
  return dx;
}

ConjugatedMap::ConjugatedMap(LatticeAutomorphism L, TrigPolynomialField psi)
    : L_(std::move(L)), phi_(std::move(psi)), Lm_(L_.matrix()), Linv_(L_.inverse().matrix()) {
  linear_ = phi_.field().empty() || phi_.field().c1_norm() == 0.0;
}

Vec3 ConjugatedMap::lift(const Vec3& x) const { return phi_(Lm_ * phi_.inverse(x)); }

Vec3 ConjugatedMap::lift_inverse(const Vec3& y) const {
  return phi_(Linv_ * phi_.inverse(y));
}

Mat3 ConjugatedMap::differential(const Vec3& x) const {
  const Vec3 a = phi_.inverse(x);
  return phi_.differential(Lm_ * a) * Lm_ * phi_.differential(a).inverse();
}

Vec3 ConjugatedMap::lift_increment(const Vec3& x, const Vec3& dx) const {
  const Vec3 a = phi_.inverse(x);
  const Vec3 da = phi_.inverse_increment(x, dx);
  return phi_.increment(Lm_ * a, Lm_ * da);
}

Vec3 ConjugatedMap::lift_inverse_increment(const Vec3& y, const Vec3& dy) const {
  const Vec3 a = phi_.inverse(y);
  const Vec3 da = phi_.inverse_increment(y, dy);
  return phi_.increment(Linv_ * a, Linv_ * da);
}

double c1_distance(const PerturbedMap& f) { return f.c1_size(); }

double sampled_c1_distance(const TorusMap& f, int n) {
  const Mat3 L = f.base().matrix();
  double c0 = 0.0, c1 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 x(double(i) / n, double(j) / n, double(k) / n);
        c0 = std::max(c0, f.displacement(x).norm());
        c1 = std::max(c1, (f.differential(x) - L).operatorNorm());
      }
  return std::max(c0, c1);
}

std::shared_ptr<ConjugatedMap> make_conjugated_perturbation(const LatticeAutomorphism& L,
                                                           const TrigPolynomialField& psi) {
  return std::make_shared<ConjugatedMap>(L, psi);
}

Vec3 iterate_lift(const TorusMap& f, Vec3 x, int n) {
  if (n >= 0)
    for (int i = 0; i < n; ++i) x = f.lift(x);
  else
    for (int i = 0; i < -n; ++i) x = f.lift_inverse(x);
  return x;
}

}  // namespace anosov
