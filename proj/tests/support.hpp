#pragma once

#include <anosov/density.hpp>
#include <anosov/pipeline.hpp>

#include <filesystem>
#include <numbers>
#include <string>

namespace anosov::testing {

inline LatticeAutomorphism companion() {
  return LatticeAutomorphism::from_rows({{{0, 0, -1}, {1, 0, 0}, {0, 1, 3}}});
}

/// companion()^{-2}, written out by hand.
inline LatticeAutomorphism normalized() {
  return LatticeAutomorphism::from_rows({{{3, 0, 1}, {-1, 3, 0}, {0, -1, 0}}});
}

/// Roots of x^3 - 3x^2 + 1 in closed form: x = 1 + 2 cos(theta) with
/// cos(3 theta) = 1/2. The normalized eigenvalues are 1 / x^2, ascending.
inline std::array<double, 3> closed_form_lambdas() {
  const double pi = std::numbers::pi;
  std::array<double, 3> l;
  const double thetas[3] = {pi / 9, 7 * pi / 9, 13 * pi / 9};
  for (int i = 0; i < 3; ++i) {
    const double x = 1.0 + 2.0 * std::cos(thetas[i]);
    l[i] = 1.0 / (x * x);
  }
  std::sort(l.begin(), l.end());
  return l;
}

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(ANOSOV_CONFIG_DIR) / name;
}

ExperimentConfig load_config(const std::string& name);

/// The conjugated-perturbation map of configs/conjugated.json.
std::shared_ptr<TorusMap> conjugated_map(double epsilon = 0.01);

/// f = L + eps sin(2 pi <k, x>) c for a fixed generic mode.
std::shared_ptr<TorusMap> additive_map(double epsilon);

}  // namespace anosov::testing
