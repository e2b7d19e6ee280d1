#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alphapatch/parallel.hpp"
#include "alphapatch/quadrature.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

// Self-similar cusp profile f(z) = (z+1)^p - 1 and its derivative.
inline double f_profile(double z, double p) { return std::pow(z + 1.0, p) - 1.0; }
inline double f_prime(double z, double p) {
  return p * std::pow(z + 1.0, p - 1.0);
}

// Barrier phi(t,x) = a^p f(x/a) = (x+a)^p - a^p and its x-derivative.
inline double phi_value(double a, double p, double x) {
  return std::pow(x + a, p) - std::pow(a, p);
}
inline double phi_x(double a, double p, double x) {
  return p * std::pow(x + a, p - 1.0);
}

// Scale law a(t) solving  da/dt = -c0 a^{1-p}, a(0) = a0:
// a(t) = (a0^p - p c0 t)^{1/p}, reaching zero at T(a0) = a0^p / (p c0).
struct Barrier {
  double a0 = 0.5;
  double c0 = 0.0;
  double p = 0.25;

  void validate() const {
    if (!(a0 > 0.0 && a0 < 1.0))
      throw std::invalid_argument("Barrier: a0 must lie in (0,1)");
    if (!(c0 > 0.0)) throw std::invalid_argument("Barrier: c0 must be > 0");
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("Barrier: p must lie in (0,1)");
  }

  double t_singular() const { return std::pow(a0, p) / (p * c0); }

  double scale(double t) const {
    if (t < 0.0 || t > t_singular() * (1.0 + 1e-12))
      throw std::invalid_argument("Barrier: t outside [0, t_singular]");
    const double bp = std::pow(a0, p) - p * c0 * t;
    return bp <= 0.0 ? 0.0 : std::pow(bp, 1.0 / p);
  }

  double phi(double t, double x) const { return phi_value(scale(t), p, x); }
};

inline double singular_time(double a0, double c0, double p) {
  return Barrier{a0, c0, p}.t_singular();
}

// Smallest admissible initial-data margin: eps > (1 - a0^p)^{-1} - 1.
inline double margin_epsilon_min(double a0, double p) {
  if (!(a0 > 0.0 && a0 < 1.0))
    throw std::invalid_argument("margin_epsilon_min: a0 must lie in (0,1)");
  return 1.0 / (1.0 - std::pow(a0, p)) - 1.0;
}

// Rescaled velocity profile U(z) = int_0^inf (|y-z|^{-g} - |y+z|^{-g}) f(y) dy,
// positive for z > 0, with U(0) = 0 by continuity.
inline double U_value(double z, double gamma, double p,
                      const QuadratureSpec& spec = {}) {
  if (z < 0.0) throw std::invalid_argument("U_value: requires z >= 0");
  if (!(p < gamma))
    throw std::invalid_argument("U_value: requires p < gamma");
  if (z == 0.0) return 0.0;
  return halfline_kernel_integral([p](double y) { return f_profile(y, p); }, p,
                                  z, gamma, spec,
                                  KernelCombination::difference);
}

// U'(0) = 2 int_0^inf y^{-gamma} f'(y) dy = 2 p int y^{-gamma} (1+y)^{p-1} dy.
inline double U_prime_at_zero(double gamma, double p,
                              const QuadratureSpec& spec = {}) {
  auto g = [p](double y) { return std::pow(1.0 + y, p - 1.0); };
  const double head = integrate_endpoint_singular(g, 0.0, 1.0, 0.0, gamma, spec);
  const double tail = integrate_tail(
      [&](double y) { return g(y) * std::pow(y, -gamma); }, 1.0,
      1.0 + gamma - p, spec);
  return 2.0 * p * (head + tail);
}

// Asymptotic coefficient C with U(z) ~ C z^{1-gamma+p}:
// C = int_0^inf (|w-1|^{-gamma} - (w+1)^{-gamma}) w^p dw.
inline double U_asymptotic_coefficient(double gamma, double p,
                                       const QuadratureSpec& spec = {}) {
  if (!(p < gamma))
    throw std::invalid_argument("U_asymptotic_coefficient: requires p < gamma");
  return halfline_kernel_integral(
      [p](double w) { return std::pow(w, p); }, p, 1.0, gamma, spec,
      KernelCombination::difference);
}

// First large-z correction: U(z) = z^{1-gamma+p} (C - D z^{-p} + o(z^{-p}))
// with D = int_0^inf K(1,w) dw, from the constant term of f(y) = (y+1)^p - 1.
// The ratio R approaches C at the same slow z^{-p} rate.
inline double U_tail_correction_coefficient(double gamma,
                                            const QuadratureSpec& spec = {}) {
  return halfline_kernel_integral([](double) { return 1.0; }, 0.0, 1.0, gamma,
                                  spec, KernelCombination::difference);
}

// Denominator -p f(z) + z f'(z) = p (1 - (1+z)^{p-1}) > 0 for z > 0,
// evaluated through expm1 so small z stays conditioned.
inline double ratio_denominator(double z, double p) {
  return -p * std::expm1((p - 1.0) * std::log1p(z));
}

// R(z) = U(z) f'(z) / (-p f(z) + z f'(z)).
inline double velocity_ratio(double z, double gamma, double p,
                             const QuadratureSpec& spec = {}) {
  if (!(z > 0.0)) throw std::invalid_argument("velocity_ratio: requires z > 0");
  const double den = ratio_denominator(z, p);
  if (!(den > 0.0))
    throw std::runtime_error(
        "velocity_ratio: nonpositive denominator (invariant violation)");
  return U_value(z, gamma, p, spec) * f_prime(z, p) / den;
}

// Analytic limits of R: R(0+) = U'(0)/(1-p); R(inf) = C when p = gamma/2.
inline double ratio_limit_zero(double gamma, double p,
                               const QuadratureSpec& spec = {}) {
  return U_prime_at_zero(gamma, p, spec) / (1.0 - p);
}
inline double ratio_limit_infinity(double gamma, double p,
                                   const QuadratureSpec& spec = {}) {
  return U_asymptotic_coefficient(gamma, p, spec);
}

struct RatioScan {
  std::vector<double> z_grid;
  std::vector<double> ratio_values;
  double c_estimate = 0.0;
  double limit_zero = 0.0;
  double limit_infinity = 0.0;
};

struct RatioScanSpec {
  double z_min = 1e-3;
  double z_max = 1e3;
  int count = 200;
};

// Dense log-spaced scan of R plus both analytic limits; c is the minimum.
// Requires p = gamma/2 so that both limits are finite.
inline RatioScan compute_ratio_infimum(double gamma, double p,
                                       const RatioScanSpec& scan = {},
                                       const QuadratureSpec& spec = {}) {
  if (p != 0.5 * gamma)
    throw std::invalid_argument(
        "compute_ratio_infimum: requires p = gamma/2 exactly");
  if (!(scan.count >= 2) || !(scan.z_min > 0.0) || !(scan.z_max > scan.z_min))
    throw std::invalid_argument("compute_ratio_infimum: bad scan spec");
  RatioScan out;
  out.z_grid.resize(scan.count);
  out.ratio_values.resize(scan.count);
  const double lmin = std::log(scan.z_min);
  const double lmax = std::log(scan.z_max);
  for (int i = 0; i < scan.count; ++i)
    out.z_grid[i] =
        std::exp(lmin + (lmax - lmin) * i / double(scan.count - 1));
  parallel_for(out.z_grid.size(), [&](std::size_t i) {
    out.ratio_values[i] = velocity_ratio(out.z_grid[i], gamma, p, spec);
  });
  out.limit_zero = ratio_limit_zero(gamma, p, spec);
  out.limit_infinity = ratio_limit_infinity(gamma, p, spec);
  double c = std::min(out.limit_zero, out.limit_infinity);
  for (double r : out.ratio_values) c = std::min(c, r);
  out.c_estimate = c;
  if (!(out.c_estimate > 0.0))
    throw std::runtime_error("compute_ratio_infimum: nonpositive infimum");
  return out;
}

struct SupersolutionViolation {
  double t = 0.0;
  double z = 0.0;
  double lhs = 0.0;  // c0 a^{1-p}
  double rhs = 0.0;  // a^{1-gamma+p} R(z)
};

struct SupersolutionReport {
  bool pass = false;
  double gamma = 0.0;
  double p = 0.0;
  double c0 = 0.0;
  double c_estimate = 0.0;
  double limit_zero = 0.0;
  double limit_infinity = 0.0;
  double min_slack = 0.0;        // min over (t,z) of R(z) - c0 a^{gamma-2p}
  double t_dependence = 0.0;     // max over z of slack spread across t samples
  std::vector<SupersolutionViolation> violations;
};

// Verifies (-da/dt) < a^{1-gamma+p} R(z) pointwise, i.e. the supersolution
// inequality phi_t + u[phi] phi_x < 0. At p = gamma/2 both sides scale as
// a^{1-p}, so the normalized slack R(z) - c0 is t-independent.
inline SupersolutionReport check_supersolution(const Barrier& barrier,
                                               double gamma,
                                               const RatioScan& scan,
                                               int t_samples = 16,
                                               const QuadratureSpec& spec = {}) {
  barrier.validate();
  (void)spec;
  SupersolutionReport rep;
  rep.gamma = gamma;
  rep.p = barrier.p;
  rep.c0 = barrier.c0;
  rep.c_estimate = scan.c_estimate;
  rep.limit_zero = scan.limit_zero;
  rep.limit_infinity = scan.limit_infinity;

  std::vector<double> zs = scan.z_grid;
  std::vector<double> rs = scan.ratio_values;
  zs.push_back(0.0);  // z -> 0 limit
  rs.push_back(scan.limit_zero);
  zs.push_back(std::numeric_limits<double>::infinity());
  rs.push_back(scan.limit_infinity);

  const double T = barrier.t_singular();
  const double expo = gamma - 2.0 * barrier.p;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_spread = 0.0;
  for (std::size_t iz = 0; iz < zs.size(); ++iz) {
    double s_min = std::numeric_limits<double>::infinity();
    double s_max = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < t_samples; ++it) {
      const double t = 0.99 * T * it / double(std::max(1, t_samples - 1));
      const double a = barrier.scale(t);
      const double slack = rs[iz] - barrier.c0 * std::pow(a, expo);
      s_min = std::min(s_min, slack);
      s_max = std::max(s_max, slack);
      if (!(slack > 0.0)) {
        const double a1p = std::pow(a, 1.0 - barrier.p);
        rep.violations.push_back(
            {t, zs[iz], barrier.c0 * a1p,
             std::pow(a, 1.0 - gamma + barrier.p) * rs[iz]});
      }
    }
    min_slack = std::min(min_slack, s_min);
    max_spread = std::max(max_spread, s_max - s_min);
  }
  rep.min_slack = min_slack;
  rep.t_dependence = max_spread;
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace alphapatch
