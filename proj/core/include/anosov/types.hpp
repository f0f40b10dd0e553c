#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace anosov {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using IMat3 = Eigen::Matrix<std::int64_t, 3, 3>;
using IVec3 = Eigen::Matrix<std::int64_t, 3, 1>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One-dimensional invariant bundles of the fine splitting.
enum class Bundle { Stable, WeakUnstable, StrongUnstable };

std::string_view to_string(Bundle b);
Bundle parse_bundle(std::string_view tag);  // "s", "wu", "uu"

/// Reduce each coordinate to [0, 1).
inline Vec3 wrap(const Vec3& x) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    r[i] = x[i] - std::floor(x[i]);
    if (r[i] >= 1.0) r[i] = 0.0;
  }
  return r;
}

inline Vec2 wrap(const Vec2& x) {
  Vec2 r;
  for (int i = 0; i < 2; ++i) {
    r[i] = x[i] - std::floor(x[i]);
    if (r[i] >= 1.0) r[i] = 0.0;
  }
  return r;
}

/// Representative of a - b in [-1/2, 1/2)^d.
template <typename V>
V torus_delta(const V& a, const V& b) {
  V d = a - b;
  for (int i = 0; i < d.size(); ++i) d[i] -= std::round(d[i]);
  return d;
}

/// Flat distance on the torus, minimised over lattice translates.
template <typename V>
double torus_distance(const V& a, const V& b) {
  return torus_delta(a, b).norm();
}

/// Distance from s to the nearest integer.
inline double distance_to_integer(double s) { return std::abs(s - std::round(s)); }

}  // namespace anosov
