#pragma once

#include "anosov/lattice.hpp"

#include <memory>
#include <vector>

namespace anosov {

/// One real mode c * sin(2 pi <k, x> + phase).
struct TrigTerm {
  std::array<int, 3> frequency{0, 0, 0};
  Vec3 coefficient = Vec3::Zero();
  double phase = 0.0;

  bool operator==(const TrigTerm&) const = default;
};

/// Real trigonometric polynomial vector field u : T^3 -> R^3.
class TrigPolynomialField {
 public:
  TrigPolynomialField() = default;
  explicit TrigPolynomialField(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

  static TrigPolynomialField single_mode(std::array<int, 3> k, const Vec3& c, double phase = 0.0) {
    return TrigPolynomialField({TrigTerm{k, c, phase}});
  }

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Vec3 operator()(const Vec3& x) const;
  Mat3 jacobian(const Vec3& x) const;
  /// u(x + dx) - u(x) without cancellation for small dx.
  Vec3 increment(const Vec3& x, const Vec3& dx) const;

  /// Sum of |c_k|.
  double c0_norm() const;
  /// Sum of 2 pi |k| |c_k|, a bound for the operator norm of Du.
  double c1_norm() const;

  TrigPolynomialField scaled(double s) const;
  TrigPolynomialField operator+(const TrigPolynomialField& o) const;

  bool operator==(const TrigPolynomialField&) const = default;

 private:
  std::vector<TrigTerm> terms_;
};

/// Common interface for the maps f the pipeline studies. Points are lifts in
/// R^3; evaluate() reduces to the fundamental domain [0,1)^3.
class TorusMap {
 public:
  virtual ~TorusMap() = default;

  virtual const LatticeAutomorphism& base() const = 0;
  virtual Vec3 lift(const Vec3& x) const = 0;
  virtual Vec3 lift_inverse(const Vec3& y) const = 0;
  virtual Mat3 differential(const Vec3& x) const = 0;

  /// F(x + dx) - F(x), accurate relative to |dx|.
  virtual Vec3 lift_increment(const Vec3& x, const Vec3& dx) const;
  /// F^{-1}(y + dy) - F^{-1}(y), accurate relative to |dy|.
  virtual Vec3 lift_inverse_increment(const Vec3& y, const Vec3& dy) const;

  Vec3 evaluate(const Vec3& x) const { return wrap(lift(x)); }
  Vec3 evaluate_inverse(const Vec3& y) const { return wrap(lift_inverse(y)); }
  /// Lift of f at the fundamental-domain representative of x.
  Vec3 lift_evaluate(const Vec3& x) const { return lift(wrap(x)); }
  Mat3 inverse_differential(const Vec3& y) const {
    return differential(lift_inverse(y)).inverse();
  }
  /// f - L as a periodic field.
  Vec3 displacement(const Vec3& x) const { return lift(x) - base().apply(x); }
  bool is_linear() const { return linear_; }

 protected:
  bool linear_ = false;
};

/// f = L + u.
class PerturbedMap final : public TorusMap {
 public:
  PerturbedMap(LatticeAutomorphism L, TrigPolynomialField u);

  const LatticeAutomorphism& base() const override { return L_; }
  const TrigPolynomialField& field() const { return u_; }
  double c1_size() const { return c1_size_; }

  Vec3 lift(const Vec3& x) const override;
  Vec3 lift_inverse(const Vec3& y) const override;
  Mat3 differential(const Vec3& x) const override;
  Vec3 lift_increment(const Vec3& x, const Vec3& dx) const override;
  Vec3 lift_inverse_increment(const Vec3& y, const Vec3& dy) const override;

 private:
  LatticeAutomorphism L_;
  TrigPolynomialField u_;
  Mat3 Lm_;
  Mat3 Linv_;
  double c1_size_;
};

/// Near-identity diffeomorphism phi = id + psi with its Banach-iteration inverse.
class NearIdentityDiffeo {
 public:
  explicit NearIdentityDiffeo(TrigPolynomialField psi);

  const TrigPolynomialField& field() const { return psi_; }
  Vec3 operator()(const Vec3& x) const { return x + psi_(x); }
  Vec3 inverse(const Vec3& y) const;
  Mat3 differential(const Vec3& x) const { return Mat3::Identity() + psi_.jacobian(x); }
  Vec3 increment(const Vec3& x, const Vec3& dx) const { return dx + psi_.increment(x, dx); }
  Vec3 inverse_increment(const Vec3& y, const Vec3& dy) const;

 private:
  TrigPolynomialField psi_;
};

/// f = phi o L o phi^{-1}; shares the TorusMap interface with PerturbedMap.
class ConjugatedMap final : public TorusMap {
 public:
  ConjugatedMap(LatticeAutomorphism L, TrigPolynomialField psi);

  const LatticeAutomorphism& base() const override { return L_; }
  const NearIdentityDiffeo& phi() const { return phi_; }

  Vec3 lift(const Vec3& x) const override;
  Vec3 lift_inverse(const Vec3& y) const override;
  Mat3 differential(const Vec3& x) const override;
  Vec3 lift_increment(const Vec3& x, const Vec3& dx) const override;
  Vec3 lift_inverse_increment(const Vec3& y, const Vec3& dy) const override;

 private:
  LatticeAutomorphism L_;
  NearIdentityDiffeo phi_;
  Mat3 Lm_;
  Mat3 Linv_;
};

/// max(C^0 norm, C^1 bound) of f - L.
double c1_distance(const PerturbedMap& f);

/// Sampled size of f - L on an n^3 grid, for maps without coefficient data.
double sampled_c1_distance(const TorusMap& f, int n);

std::shared_ptr<ConjugatedMap> make_conjugated_perturbation(const LatticeAutomorphism& L,
                                                           const TrigPolynomialField& psi);

/// F^n(x) on the lift.
Vec3 iterate_lift(const TorusMap& f, Vec3 x, int n);

}  // namespace anosov
