#include "support.hpp"

#include <anosov/io.hpp>

namespace anosov::testing {

ExperimentConfig load_config(const std::string& name) {
  return config_from_json(io::read_text(config_path(name)));
}

std::shared_ptr<TorusMap> conjugated_map(double epsilon) {
  const TrigPolynomialField psi =
      TrigPolynomialField::single_mode({1, 0, 1}, Vec3(0.6, -0.48, 0.64)).scaled(epsilon);
  return make_conjugated_perturbation(normalized(), psi);
}

std::shared_ptr<TorusMap> additive_map(double epsilon) {
  const TrigPolynomialField u =
      TrigPolynomialField::single_mode({0, 1, 1}, Vec3(0.3, 0.5, -0.2), 0.4).scaled(epsilon);
  return std::make_shared<PerturbedMap>(normalized(), u);
}

}  // namespace anosov::testing
