#include "anosov/cones.hpp"

#include "anosov/errors.hpp"
#include "anosov/parallel.hpp"

#include <mutex>
#include <sstream>

namespace anosov {

namespace {

struct ConeCheck {
  double ratio = 0.0;       // worst image aperture / aperture
  double min_growth = 0.0;  // min over extreme rays of c_i' / c_i
  double max_growth = 0.0;
};

// Cone {|c_j| <= g |c_i|}: its half c_i > 0 is spanned by the four rays with
// c_i = 1 and c_j = +-g, so checking the images of those rays is exact.
ConeCheck check_cone(const Mat3& M, int axis, double g) {
  const int j = (axis + 1) % 3, k = (axis + 2) % 3;
  ConeCheck out;
  out.min_growth = std::numeric_limits<double>::infinity();
  out.max_growth = -std::numeric_limits<double>::infinity();
  for (double sj : {-1.0, 1.0}) {
    for (double sk : {-1.0, 1.0}) {
      Vec3 c;
      c[axis] = 1.0;
      c[j] = sj * g;
      c[k] = sk * g;
      const Vec3 im = M * c;
      if (im[axis] <= 0.0) {
        out.ratio = std::numeric_limits<double>::infinity();
        return out;
      }
      out.ratio = std::max(out.ratio, std::max(std::abs(im[j]), std::abs(im[k])) / (g * im[axis]));
      out.min_growth = std::min(out.min_growth, im[axis]);
      out.max_growth = std::max(out.max_growth, im[axis]);
    }
  }
  return out;
}

}  // namespace

ConeReport verify_fine_splitting(const TorusMap& f, const Splitting& split, int grid_n,
                                 double aperture) {
  if (grid_n < 1) throw Error(ErrorCode::InvalidConfig, "cone grid must be >= 1");
  const Mat3 P = split.frame();
  const Mat3 Pinv = P.inverse();
  const std::size_t total = std::size_t(grid_n) * grid_n * grid_n;

  struct Local {
    double ratio = 0, ls = 0, wmin = 1e300, wmax = 0, luu = 1e300;
    std::string witness;
  };
  std::vector<Local> per(total);

  parallel_for(0, total, [&](std::size_t idx) {
    const int i = int(idx / (std::size_t(grid_n) * grid_n));
    const int j = int((idx / grid_n) % grid_n);
    const int k = int(idx % grid_n);
    const Vec3 x(double(i) / grid_n, double(j) / grid_n, double(k) / grid_n);
    const Mat3 D = f.differential(x);
    const Mat3 M = Pinv * D * P;
    const Mat3 Minv = M.inverse();
    Local& loc = per[idx];

    const ConeCheck uu = check_cone(M, 2, aperture);              // vectors, forward
    const ConeCheck s = check_cone(Minv, 0, aperture);            // vectors, backward
    const ConeCheck u_plane = check_cone(Minv.transpose(), 0, aperture);  // covector of E^u
    const ConeCheck cs_plane = check_cone(M.transpose(), 2, aperture);    // covector of E^{s+wu}
    const ConeCheck wu = check_cone(M, 1, aperture);              // weak rate range only

    struct Named {
      const char* name;
      double r;
    };
    for (const Named& n : {Named{"uu", uu.ratio}, Named{"s", s.ratio}, Named{"u-plane", u_plane.ratio},
                           Named{"s+wu-plane", cs_plane.ratio}}) {
      if (n.r > loc.ratio) loc.ratio = n.r;
      if (!(n.r < 1.0) && loc.witness.empty()) {
        std::ostringstream os;
        os << "cone " << n.name << " not invariant at x = (" << x[0] << ", " << x[1] << ", "
           << x[2] << "), image aperture ratio " << n.r;
        loc.witness = os.str();
      }
    }
    loc.ls = 1.0 / s.min_growth;
    loc.luu = uu.min_growth;
    loc.wmin = wu.min_growth;
    loc.wmax = wu.max_growth;
  });

  ConeReport rep;
  rep.aperture = aperture;
  rep.grid_n = grid_n;
  rep.lambda_uu = std::numeric_limits<double>::infinity();
  rep.lambda_wu_min = std::numeric_limits<double>::infinity();
  for (const Local& loc : per) {
    if (!loc.witness.empty()) throw Error(ErrorCode::ConeViolation, loc.witness);
    rep.invariance_margin = std::max(rep.invariance_margin, loc.ratio);
    rep.lambda_s = std::max(rep.lambda_s, loc.ls);
    rep.lambda_uu = std::min(rep.lambda_uu, loc.luu);
    rep.lambda_wu_min = std::min(rep.lambda_wu_min, loc.wmin);
    rep.lambda_wu_max = std::max(rep.lambda_wu_max, loc.wmax);
  }
  if (!(rep.lambda_s < 1.0) || !(rep.lambda_wu_min > 1.0)) {
    std::ostringstream os;
    os << "rates lose hyperbolicity: stable " << rep.lambda_s << ", weak " << rep.lambda_wu_min;
    throw Error(ErrorCode::ConeViolation, os.str());
  }
  rep.contraction = std::max(rep.lambda_s, 1.0 / rep.lambda_wu_min);
  // Adapted norm |P^{-1} v|_inf on a cone of aperture g versus the flat norm.
  rep.constant_C = P.norm() * Pinv.norm() * (1.0 + 2.0 * aperture);
  return rep;
}

}  // namespace anosov
