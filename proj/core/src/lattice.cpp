#include "anosov/lattice.hpp"

#include "anosov/errors.hpp"

#include <algorithm>
#include <sstream>

namespace anosov {

std::int64_t integer_determinant(const IMat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

LatticeAutomorphism::LatticeAutomorphism(const IMat3& entries)
    : entries_(entries), det_(integer_determinant(entries)) {
  if (det_ != 1 && det_ != -1) {
    std::ostringstream os;
    os << "determinant " << det_ << " is not +-1";
    throw Error(ErrorCode::NotUnimodular, os.str());
  }
}

LatticeAutomorphism LatticeAutomorphism::from_rows(
    const std::array<std::array<std::int64_t, 3>, 3>& rows) {
  IMat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rows[i][j];
  return LatticeAutomorphism(m);
}

LatticeAutomorphism LatticeAutomorphism::inverse() const {
  const IMat3& m = entries_;
  IMat3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return LatticeAutomorphism(IMat3(adj * det_));  // det = +-1, so 1/det = det
}

LatticeAutomorphism LatticeAutomorphism::power(int k) const {
  const IMat3 base = k < 0 ? inverse().entries_ : entries_;
  IMat3 result = IMat3::Identity();
  for (int i = 0; i < std::abs(k); ++i) result = result * base;
  return LatticeAutomorphism(result);
}

namespace {

using cd = std::complex<double>;

struct CharPoly {
  double c2, c1, c0;  // z^3 + c2 z^2 + c1 z + c0
  cd value(cd z) const { return ((z + c2) * z + c1) * z + c0; }
  cd derivative(cd z) const { return (3.0 * z + 2.0 * c2) * z + c1; }
};

CharPoly char_poly(const IMat3& m) {
  const double tr = static_cast<double>(m.trace());
  const double minors = static_cast<double>(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) +
                                            m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                                            m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
  const double det = static_cast<double>(integer_determinant(m));
  return {-tr, minors, -det};
}

bool ordered(const std::array<double, 3>& l, double gap_tol) {
  return l[0] > 0 && l[0] < 1 && l[1] > 1 && l[2] > l[1] * (1.0 + gap_tol);
}

}  // namespace

SpectrumReport spectrum(const LatticeAutomorphism& L) {
  const CharPoly poly = char_poly(L.entries());
  Eigen::EigenSolver<Mat3> solver(L.matrix(), false);
  SpectrumReport rep;
  for (int i = 0; i < 3; ++i) {
    cd z = solver.eigenvalues()[i];
    for (int it = 0; it < 8; ++it) {
      const cd d = poly.derivative(z);
      if (std::abs(d) == 0.0) break;
      const cd step = poly.value(z) / d;
      z -= step;
      if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(z))) break;
    }
    rep.eigenvalues[i] = z;
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](cd a, cd b) { return std::abs(a) < std::abs(b); });

  rep.real_spectrum = true;
  rep.unit_circle_gap = std::numeric_limits<double>::infinity();
  for (auto& z : rep.eigenvalues) {
    if (std::abs(z.imag()) < kRealTolerance * std::max(1.0, std::abs(z)))
      z = cd(z.real(), 0.0);
    else
      rep.real_spectrum = false;
    rep.unit_circle_gap = std::min(rep.unit_circle_gap, std::abs(std::abs(z) - 1.0));
    rep.max_residual = std::max(rep.max_residual, std::abs(poly.value(z)));
  }
  if (rep.real_spectrum) {
    std::array<double, 3> l{rep.eigenvalues[0].real(), rep.eigenvalues[1].real(),
                            rep.eigenvalues[2].real()};
    rep.satisfies_ordering = ordered(l, 1e-8);
  }
  if (rep.unit_circle_gap < kUnitCircleTolerance) {
    std::ostringstream os;
    os << "eigenvalue modulus within " << rep.unit_circle_gap << " of the unit circle";
    throw Error(ErrorCode::NotHyperbolic, os.str());
  }
  return rep;
}

Normalization normalize_spectrum(const LatticeAutomorphism& L) {
  const SpectrumReport rep = spectrum(L);
  if (!rep.real_spectrum)
    throw Error(ErrorCode::NoRealNormalization, "spectrum is not real");
  for (int k : {1, -1, 2, -2}) {
    std::array<double, 3> l;
    for (int i = 0; i < 3; ++i) l[i] = std::pow(rep.eigenvalues[i].real(), k);
    std::sort(l.begin(), l.end());
    if (ordered(l, 1e-8)) return {L.power(k), k};
  }
  throw Error(ErrorCode::NoRealNormalization,
              "no power in {1,-1,2,-2} gives 0<l1<1<l2<l3");
}

namespace {

// Null vector of (M - lambda I) from the largest cross product of its rows.
Vec3 null_vector(const Mat3& M, double lambda) {
  const Mat3 A = M - lambda * Mat3::Identity();
  Vec3 best = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      Vec3 c = A.row(i).transpose().cross(A.row(j).transpose());
      if (c.norm() > best.norm()) best = c;
    }
  }
  best.normalize();
  // One step of inverse iteration tightens the residual.
  Eigen::FullPivLU<Mat3> lu(A + 1e-14 * std::max(1.0, std::abs(lambda)) * Mat3::Identity());
  Vec3 refined = lu.solve(best);
  if (refined.allFinite() && refined.norm() > 0) best = refined.normalized();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(best[i]) > 1e-12) {
      if (best[i] < 0) best = -best;
      break;
    }
  }
  return best;
}

}  // namespace

double Splitting::eigenvalue(Bundle b) const {
  switch (b) {
    case Bundle::Stable: return lambda1;
    case Bundle::WeakUnstable: return lambda2;
    case Bundle::StrongUnstable: return lambda3;
  }
  return 0.0;
}

const Vec3& Splitting::direction(Bundle b) const {
  switch (b) {
    case Bundle::Stable: return e_s;
    case Bundle::WeakUnstable: return e_wu;
    case Bundle::StrongUnstable: break;
  }
  return e_uu;
}

Mat3 Splitting::frame() const {
  Mat3 P;
  P.col(0) = e_s;
  P.col(1) = e_wu;
  P.col(2) = e_uu;
  return P;
}

Mat3 Splitting::frame_inverse() const { return frame().inverse(); }

Vec2 Splitting::beta() const { return Vec2(e_uu[0] / e_uu[2], e_uu[1] / e_uu[2]); }

Splitting splitting(const LatticeAutomorphism& L) {
  const SpectrumReport rep = spectrum(L);
  if (!rep.real_spectrum || !rep.satisfies_ordering)
    throw Error(ErrorCode::NoRealNormalization,
                "splitting needs a normalized spectrum 0<l1<1<l2<l3");
  Splitting s;
  s.lambda1 = rep.eigenvalues[0].real();
  s.lambda2 = rep.eigenvalues[1].real();
  s.lambda3 = rep.eigenvalues[2].real();
  const double spacing = std::min(s.lambda2 - s.lambda1, s.lambda3 - s.lambda2);
  if (spacing < 1e-8 * s.lambda3)
    throw Error(ErrorCode::DegenerateSpectrum, "eigenvalues too close to separate");
  const Mat3 M = L.matrix();
  s.e_s = null_vector(M, s.lambda1);
  s.e_wu = null_vector(M, s.lambda2);
  s.e_uu = null_vector(M, s.lambda3);
  if (std::abs(s.frame().determinant()) <= 1e-6)
    throw Error(ErrorCode::DegenerateSpectrum, "eigenframe is nearly singular");
  return s;
}

DiophantineCertificate diophantine_constant(const Vec2& beta, int P) {
  if (P < 1) throw Error(ErrorCode::InvalidConfig, "search radius must be >= 1");
  DiophantineCertificate cert;
  cert.beta = beta;
  cert.search_radius_P = P;
  cert.constant_c = std::numeric_limits<double>::infinity();
  const double P2 = static_cast<double>(P) * P;
  // p and -p give the same distance, so scan the half plane p1 > 0 or
  // (p1 == 0, p2 > 0).
  for (int p1 = 0; p1 <= P; ++p1) {
    for (int p2 = -P; p2 <= P; ++p2) {
      if (p1 == 0 && p2 <= 0) continue;
      const double n2 = static_cast<double>(p1) * p1 + static_cast<double>(p2) * p2;
      if (n2 > P2) continue;
      const double s = beta[0] * p1 + beta[1] * p2;
      const double dist = distance_to_integer(s);
      if (dist <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(s) + 1.0)) {
        std::ostringstream os;
        os << "<beta, p> is an integer at p = (" << p1 << ", " << p2 << ")";
        throw Error(ErrorCode::RationalResonance, os.str());
      }
      const double c = n2 * dist;  // |p|^m with m = 2
      if (c < cert.constant_c) {
        cert.constant_c = c;
        cert.minimizing_p = {p1, p2};
      }
    }
  }
  return cert;
}

CriticalRegularity critical_regularity(double lambda2, double lambda3) {
  CriticalRegularity cr;
  cr.ratio = std::log(lambda3) / std::log(lambda2);
  const double nearest = std::round(cr.ratio);
  cr.near_integer = std::abs(cr.ratio - nearest) < 1e-9 * std::max(1.0, nearest);
  cr.kappa = cr.near_integer ? static_cast<int>(nearest) : static_cast<int>(std::floor(cr.ratio));
  return cr;
}

}  // namespace anosov
