#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace alphapatch {

// Difference kernel K(x,y) = |y-x|^{-gamma} - (x+y)^{-gamma} for x,y >= 0.
// Written through expm1/log1p when the two powers are close, so the
// cancellation for min(x,y) << max(x,y) stays fully conditioned.
inline double kernel_diff(double x, double y, double gamma) {
  const double s = x + y;
  const double d = std::abs(y - x);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  const double m = 2.0 * std::min(x, y) / s;  // d = s*(1-m)
  if (m < 0.5)
    return std::pow(s, -gamma) * std::expm1(-gamma * std::log1p(-m));
  return std::pow(d, -gamma) - std::pow(s, -gamma);
}

// Sum kernel |y-x|^{-gamma} + (x+y)^{-gamma}; no cancellation.
inline double kernel_sum(double x, double y, double gamma) {
  const double d = std::abs(y - x);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(d, -gamma) + std::pow(x + y, -gamma);
}

// Cutoff shape: 3/4 on [0,3/4], z on [1,inf), and on (3/4,1) the unique
// quintic with matching value and first/second derivatives at both junctions.
// G(s) = 6s^3 - 8s^4 + 3s^5 has G' = s^2(18 - 32 s + 15 s^2) > 0, so eta is
// nondecreasing and >= 3/4 everywhere.
inline double eta(double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("eta: requires z >= 0");
  if (z <= 0.75) return 0.75;
  if (z >= 1.0) return z;
  const double s = 4.0 * (z - 0.75);
  const double g = s * s * s * (6.0 + s * (-8.0 + 3.0 * s));
  return 0.75 + 0.25 * g;
}

inline double eta_scaled(double z, double eps) { return eps * eta(z / eps); }

// Regularized kernel k_eps(z) = eta_eps(|z|)^{-gamma}: equals |z|^{-gamma}
// for |z| >= eps and the plateau (3 eps/4)^{-gamma} for |z| <= 3 eps/4.
struct RegKernel {
  double reg_epsilon = 0.0;
  double gamma = 0.5;

  RegKernel(double eps_, double gamma_) : reg_epsilon(eps_), gamma(gamma_) {
    if (!(reg_epsilon > 0.0))
      throw std::invalid_argument("RegKernel: reg_epsilon must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("RegKernel: gamma must lie in (0,1)");
  }

  double operator()(double z) const {
    return std::pow(eta_scaled(std::abs(z), reg_epsilon), -gamma);
  }

  double plateau_value() const {
    return std::pow(0.75 * reg_epsilon, -gamma);
  }

  double diff(double x, double y) const {
    return (*this)(x - y) - (*this)(x + y);
  }
  double sum(double x, double y) const {
    return (*this)(x - y) + (*this)(x + y);
  }
};

}  // namespace alphapatch
