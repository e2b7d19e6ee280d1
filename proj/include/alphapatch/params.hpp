#pragma once

#include <stdexcept>
#include <string>

namespace alphapatch {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model exponents. gamma is derived, gamma = 1 - alpha exactly.
struct ModelParams {
  double alpha = 0.5;
  double gamma = 0.5;
  double p = 0.25;           // cusp exponent, 0 < p < gamma
  double q = 0.25;           // decay exponent, 0 < q < gamma
  double margin_epsilon = 0.0;  // initial-data margin, > 0

  static ModelParams make(double alpha, double p, double q,
                          double margin_epsilon) {
    ModelParams m;
    m.alpha = alpha;
    m.gamma = 1.0 - alpha;
    m.p = p;
    m.q = q;
    m.margin_epsilon = margin_epsilon;
    m.validate();
    return m;
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw ConfigError("ModelParams: alpha must lie in (0,1)");
    if (gamma != 1.0 - alpha)
      throw ConfigError("ModelParams: gamma must equal 1 - alpha exactly");
    if (!(p > 0.0 && p < gamma))
      throw ConfigError("ModelParams: p must lie in (0, gamma)");
    if (!(q > 0.0 && q < gamma))
      throw ConfigError("ModelParams: q must lie in (0, gamma)");
    if (!(margin_epsilon > 0.0))
      throw ConfigError("ModelParams: margin_epsilon must be > 0");
  }

  // Barrier mode additionally pins p = gamma/2 exactly.
  void validate_barrier_mode() const {
    validate();
    if (p != 0.5 * gamma)
      throw ConfigError(
          "ModelParams: barrier mode requires p = gamma/2 exactly (p=" +
          std::to_string(p) + ", gamma=" + std::to_string(gamma) + ")");
  }
};

}  // namespace alphapatch
