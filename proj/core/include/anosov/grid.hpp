#pragma once

#include "anosov/errors.hpp"
#include "anosov/types.hpp"

#include <array>
#include <vector>

namespace anosov {

enum class Interpolation { Linear, Cubic };

namespace detail {

template <typename Value>
Value zero_value() {
  if constexpr (std::is_arithmetic_v<Value>)
    return Value(0);
  else
    return Value::Zero();
}

// 4-point Lagrange weights on nodes -1, 0, 1, 2 at offset t in [0, 1).
inline std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

}  // namespace detail

/// Periodic samples on the uniform grid (1/N) Z^Dim of the Dim-torus.
template <int Dim, typename Value>
class GridFunction {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;
  using Index = std::array<int, Dim>;

  GridFunction() = default;
  explicit GridFunction(int n, Interpolation order = Interpolation::Cubic)
      : n_(n), order_(order) {
    if (n < 4) throw Error(ErrorCode::InvalidConfig, "grid resolution must be at least 4");
    std::size_t total = 1;
    for (int d = 0; d < Dim; ++d) total *= std::size_t(n);
    values_.assign(total, detail::zero_value<Value>());
  }

  int resolution() const { return n_; }
  std::size_t size() const { return values_.size(); }
  Interpolation order() const { return order_; }
  void set_order(Interpolation o) { order_ = o; }

  std::size_t flat(const Index& idx) const {
    std::size_t f = 0;
    for (int d = 0; d < Dim; ++d) f = f * n_ + std::size_t(((idx[d] % n_) + n_) % n_);
    return f;
  }

  Index unflat(std::size_t f) const {
    Index idx;
    for (int d = Dim - 1; d >= 0; --d) {
      idx[d] = int(f % n_);
      f /= n_;
    }
    return idx;
  }

  Point node(std::size_t f) const {
    const Index idx = unflat(f);
    Point p;
    for (int d = 0; d < Dim; ++d) p[d] = double(idx[d]) / n_;
    return p;
  }

  Value& operator[](std::size_t f) { return values_[f]; }
  const Value& operator[](std::size_t f) const { return values_[f]; }
  Value& at(const Index& idx) { return values_[flat(idx)]; }
  const Value& at(const Index& idx) const { return values_[flat(idx)]; }

  std::vector<Value>& values() { return values_; }
  const std::vector<Value>& values() const { return values_; }

  /// Periodic interpolation at an arbitrary point; reproduces node values.
  Value operator()(const Point& x) const {
    return order_ == Interpolation::Cubic ? cubic(x) : linear(x);
  }

  Value linear(const Point& x) const {
    Index base;
    Point frac;
    locate(x, base, frac);
    Value acc = detail::zero_value<Value>();
    for (int corner = 0; corner < (1 << Dim); ++corner) {
      double w = 1.0;
      Index idx;
      for (int d = 0; d < Dim; ++d) {
        const int bit = (corner >> d) & 1;
        idx[d] = base[d] + bit;
        w *= bit ? frac[d] : 1.0 - frac[d];
      }
      if (w != 0.0) acc += w * values_[flat(idx)];
    }
    return acc;
  }

  Value cubic(const Point& x) const {
    Index base;
    Point frac;
    locate(x, base, frac);
    std::array<std::array<double, 4>, Dim> w;
    for (int d = 0; d < Dim; ++d) w[d] = detail::cubic_weights(frac[d]);
    Value acc = detail::zero_value<Value>();
    int total = 1;
    for (int d = 0; d < Dim; ++d) total *= 4;
    for (int c = 0; c < total; ++c) {
      double weight = 1.0;
      Index idx;
      int rem = c;
      for (int d = 0; d < Dim; ++d) {
        const int o = rem % 4;
        rem /= 4;
        idx[d] = base[d] + o - 1;
        weight *= w[d][o];
      }
      acc += weight * values_[flat(idx)];
    }
    return acc;
  }

  /// Largest node-value norm.
  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) {
      if constexpr (std::is_arithmetic_v<Value>)
        m = std::max(m, std::abs(double(v)));
      else
        m = std::max(m, v.norm());
    }
    return m;
  }

 private:
  void locate(const Point& x, Index& base, Point& frac) const {
    for (int d = 0; d < Dim; ++d) {
      const double s = x[d] * n_;
      const double fl = std::floor(s);
      base[d] = int(static_cast<long long>(fl) % n_);
      frac[d] = s - fl;
    }
  }

  int n_ = 0;
  Interpolation order_ = Interpolation::Cubic;
  std::vector<Value> values_;
};

using ScalarGrid3 = GridFunction<3, double>;
using VectorGrid3 = GridFunction<3, Vec3>;
using ScalarGrid2 = GridFunction<2, double>;
using VectorGrid2 = GridFunction<2, Vec2>;

}  // namespace anosov
