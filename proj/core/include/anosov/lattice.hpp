#pragma once

#include "anosov/types.hpp"

#include <array>
#include <complex>

namespace anosov {

std::int64_t integer_determinant(const IMat3& m);

/// Integer 3x3 matrix with |det| = 1, acting on T^3.
class LatticeAutomorphism {
 public:
  /// Throws NotUnimodular unless |det| = 1.
  explicit LatticeAutomorphism(const IMat3& entries);

  static LatticeAutomorphism from_rows(const std::array<std::array<std::int64_t, 3>, 3>& rows);

  const IMat3& entries() const { return entries_; }
  Mat3 matrix() const { return entries_.cast<double>(); }
  std::int64_t determinant() const { return det_; }

  LatticeAutomorphism inverse() const;
  /// L^k for any integer k (negative powers go through the exact inverse).
  LatticeAutomorphism power(int k) const;

  Vec3 apply(const Vec3& x) const { return matrix() * x; }
  IVec3 apply(const IVec3& m) const { return entries_ * m; }

  bool operator==(const LatticeAutomorphism& o) const { return entries_ == o.entries_; }

 private:
  IMat3 entries_;
  std::int64_t det_;
};

struct SpectrumReport {
  std::array<std::complex<double>, 3> eigenvalues;  // ascending modulus
  bool real_spectrum = false;
  /// 0 < l1 < 1 < l2 < l3 holds for the matrix as given.
  bool satisfies_ordering = false;
  double unit_circle_gap = 0.0;
  double max_residual = 0.0;  // max |charpoly(lambda_i)|
};

inline constexpr double kUnitCircleTolerance = 1e-8;
inline constexpr double kRealTolerance = 1e-10;

/// Roots of the characteristic polynomial, polished by Newton on the
/// polynomial itself. Throws NotHyperbolic when a root sits on |z| = 1.
SpectrumReport spectrum(const LatticeAutomorphism& L);

struct Normalization {
  LatticeAutomorphism matrix;
  int power;
};

/// Smallest power k in {1, -1, 2, -2} (tried in that order) whose spectrum is
/// real, positive and ordered 0 < l1 < 1 < l2 < l3.
Normalization normalize_spectrum(const LatticeAutomorphism& L);

struct Splitting {
  double lambda1 = 0, lambda2 = 0, lambda3 = 0;
  Vec3 e_s, e_wu, e_uu;

  double eigenvalue(Bundle b) const;
  const Vec3& direction(Bundle b) const;
  /// Columns e_s, e_wu, e_uu.
  Mat3 frame() const;
  Mat3 frame_inverse() const;
  /// e_uu rescaled to third coordinate 1, first two entries.
  Vec2 beta() const;
  /// Length of (beta, 1).
  double uu_unit_length() const { return std::sqrt(beta().squaredNorm() + 1.0); }
};

/// Unit eigenvectors of a normalized matrix, each oriented so its first
/// nonzero coordinate is positive.
Splitting splitting(const LatticeAutomorphism& L);

struct DiophantineCertificate {
  Vec2 beta;
  int exponent_m = 2;
  double constant_c = 0.0;
  int search_radius_P = 0;
  std::array<int, 2> minimizing_p{0, 0};
};

/// min over 0 < |p| <= P (Euclidean) of |p|^2 dist(<beta, p>, Z).
DiophantineCertificate diophantine_constant(const Vec2& beta, int P);

struct CriticalRegularity {
  int kappa = 0;
  double ratio = 0.0;
  bool near_integer = false;
};

CriticalRegularity critical_regularity(double lambda2, double lambda3);

}  // namespace anosov
