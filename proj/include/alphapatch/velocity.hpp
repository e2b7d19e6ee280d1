#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "alphapatch/kernel.hpp"
#include "alphapatch/parallel.hpp"
#include "alphapatch/profile.hpp"
#include "alphapatch/quadrature.hpp"

namespace alphapatch {

// Kernel combination over the half line: the odd extension of omega folds the
// convolution into |y-x|^{-g} - (x+y)^{-g} (difference) acting on omega, and
// an even integrand (omega_x) into the sum kernel.
enum class KernelCombination { difference, sum };

namespace detail {

// integral of (a0 + a1 s + a2 s^2 + a3 s^3) * s^{-nu} over [s0, s1],
// 0 <= s0 < s1, given p_i = s_i^{1-nu}. Exact; used for panels touching or
// near the singular point, where all quantities share the local scale.
inline double power_panel(const double a[4], double s0, double p0, double s1,
                          double p1, double nu) {
  double t0 = p0, t1 = p1;
  double acc = a[0] * (t1 - t0) / (1.0 - nu);
  t0 *= s0;
  t1 *= s1;
  acc += a[1] * (t1 - t0) / (2.0 - nu);
  t0 *= s0;
  t1 *= s1;
  acc += a[2] * (t1 - t0) / (3.0 - nu);
  t0 *= s0;
  t1 *= s1;
  acc += a[3] * (t1 - t0) / (4.0 - nu);
  return acc;
}

// integral of (b0 + b1 t + b2 t^2 + b3 t^3) * (D + t)^{-nu} over [0, h] with
// D >= 2h > 0, via the binomial expansion of (D+t)^{-nu} about D. The series
// alternates with ratio <= 1/2, so every term stays on the scale of the
// result: no cancellation even when the cubic's far-field extrapolation would
// be enormous.
inline double series_panel(const double b[4], double h, double D, double Dnu,
                           double nu) {
  const double m0 = h;
  double S[4] = {b[0], b[1] * h, b[2] * h * h, b[3] * h * h * h};
  const double u = h / D;
  double cm = 1.0;     // binomial magnitude c_m = Gamma(nu+m)/(Gamma(nu) m!)
  double um = 1.0;     // (h/D)^m
  double sign = 1.0;
  double acc = 0.0;
  for (int m = 0; m < 80; ++m) {
    const double inner = S[0] / (m + 1.0) + S[1] / (m + 2.0) +
                         S[2] / (m + 3.0) + S[3] / (m + 4.0);
    const double term = sign * cm * um * inner;
    acc += term;
    if (std::abs(term) <= 1e-15 * std::abs(acc) && m >= 2) break;
    cm *= (nu + m) / (m + 1.0);
    um *= u;
    sign = -sign;
  }
  return acc * Dnu * m0;
}

// Rewrites a cubic given about its left node (coeffs c, width h) about the
// right node in the reversed coordinate tau = h - t.
inline void reverse_cubic(const double c[4], double h, double out[4]) {
  out[0] = c[0] + h * (c[1] + h * (c[2] + h * c[3]));
  out[1] = -(c[1] + h * (2.0 * c[2] + 3.0 * h * c[3]));
  out[2] = c[2] + 3.0 * h * c[3];
  out[3] = -c[3];
}

// Cubic about left node rewritten in s = y - z, delta = z - l.
inline void recenter_cubic(const double c[4], double delta, double out[4]) {
  const double D = delta;
  out[0] = c[0] + D * (c[1] + D * (c[2] + D * c[3]));
  out[1] = c[1] + D * (2.0 * c[2] + 3.0 * D * c[3]);
  out[2] = c[2] + 3.0 * D * c[3];
  out[3] = c[3];
}

// Plain antiderivative of the cubic about its left node over [t0, t1].
inline double cubic_integral(const double c[4], double t0, double t1) {
  auto F = [&](double t) {
    return t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
  };
  return F(t1) - F(t0);
}

// Binomial coefficients of (1-w)^{-g}: c_0 = 1, c_{j+1} = c_j (g+j)/(j+1).
// Tail integral of A y^q against the combined kernel from R >= 2.5 x:
//   diff: 2A sum_{j odd} c_j x^j R^{q-g-j+1} / (j+g-q-1)
//   sum:  same over even j.
inline double kernel_tail_series(KernelCombination comb, double A, double q,
                                 double x, double R, double gamma) {
  if (A == 0.0) return 0.0;
  const bool odd = (comb == KernelCombination::difference);
  const double w = x / R;
  const double rpow = std::pow(R, q - gamma + 1.0);
  double cj = 1.0, wj = 1.0;
  double acc = 0.0;
  for (int j = 0; j < 200; ++j) {
    if ((j % 2 == 1) == odd) {
      const double denom = j + gamma - q - 1.0;
      const double term = 2.0 * A * cj * wj * rpow / denom;
      acc += term;
      if (std::abs(term) <= 1e-15 * std::abs(acc) && j > 2) break;
    }
    cj *= (gamma + j) / (j + 1.0);
    wj *= w;
  }
  return acc;
}

struct RegZones {
  // part1 smoothing zone (x-eps, x+eps); part2 zone y < eps - x.
  double eps = 0.0;
  double x = 0.0;
  bool active = false;
};

}  // namespace detail

// Integral of w(y) * [k(x-y) +/- k(x+y)] over one cubic panel [l, l+h] of the
// interpolant, exact kernel k(z) = |z|^{-gamma}. Split externally so that the
// singular point x is never interior to the panel.
namespace detail {

inline double exact_panel_part1(const double c[4], double l, double h,
                                double x, double gamma) {
  // integral of cubic * |y-x|^{-gamma} over [l, l+h]; x not interior.
  const double r = l + h;
  const double omg = 1.0 - gamma;
  if (x <= l) {
    const double D = l - x;
    if (D >= 2.0 * h) {
      return series_panel(c, h, D, std::pow(D, -gamma), gamma);
    }
    double a[4];
    recenter_cubic(c, x - l, a);
    const double s0 = D, s1 = r - x;
    return power_panel(a, s0, s0 > 0 ? std::pow(s0, omg) : 0.0, s1,
                       std::pow(s1, omg), gamma);
  }
  // x >= r: panel fully left of x.
  const double D = x - r;
  if (D >= 2.0 * h) {
    double b[4];
    reverse_cubic(c, h, b);
    return series_panel(b, h, D, std::pow(D, -gamma), gamma);
  }
  double a[4];
  recenter_cubic(c, x - l, a);
  const double af[4] = {a[0], -a[1], a[2], -a[3]};
  const double s0 = D, s1 = x - l;
  return power_panel(af, s0, s0 > 0 ? std::pow(s0, omg) : 0.0, s1,
                     std::pow(s1, omg), gamma);
}

inline double exact_panel_part2(const double c[4], double l, double h,
                                double x, double gamma) {
  // integral of cubic * (x+y)^{-gamma} over [l, l+h].
  const double D = l + x;
  if (D >= 2.0 * h)
    return series_panel(c, h, D, std::pow(D, -gamma), gamma);
  double a[4];
  recenter_cubic(c, -x - l, a);
  const double omg = 1.0 - gamma;
  const double s0 = D, s1 = D + h;
  return power_panel(a, s0, s0 > 0 ? std::pow(s0, omg) : 0.0, s1,
                     std::pow(s1, omg), gamma);
}

}  // namespace detail

// Half-line convolution of a sampled profile with the exact or regularized
// kernel combination. Returns I(x) = int_0^inf [k(x-y) -/+ k(x+y)] w(y) dy;
// velocities are -I.
inline double convolve_profile(const MonotoneCubic& interp,
                               const TailModel& tail, double x, double gamma,
                               const QuadratureSpec& spec,
                               KernelCombination comb,
                               const RegKernel* reg = nullptr) {
  const double sgn2 = (comb == KernelCombination::difference) ? -1.0 : 1.0;
  const auto& X = interp.nodes();
  const std::size_t n = X.size();
  const double xN = X.back();
  const double eps = reg ? reg->reg_epsilon : 0.0;
  double acc = 0.0;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double l = X[i];
    const double r = X[i + 1];
    const double h = r - l;
    double c[4];
    interp.piece(i, c[0], c[1], c[2], c[3]);

    // part 1: k(x - y)
    const bool zone1 = reg && (l < x + eps) && (r > x - eps);
    if (!zone1) {
      if (x <= l || x >= r) {
        acc += detail::exact_panel_part1(c, l, h, x, gamma);
      } else {
        double cr[4];
        detail::recenter_cubic(c, x - l, cr);  // about x as new left node
        acc += detail::exact_panel_part1(c, l, x - l, x, gamma);
        acc += detail::exact_panel_part1(cr, x, r - x, x, gamma);
      }
    } else {
      // portions outside the smoothing zone keep the exact kernel
      auto wfun = [&](double y) {
        const double t = y - l;
        return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
      };
      const double zl = x - eps, zr = x + eps;
      if (l < zl) acc += detail::exact_panel_part1(c, l, zl - l, x, gamma);
      if (r > zr) {
        double cr[4];
        detail::recenter_cubic(c, zr - l, cr);  // about y = zr as new left node
        acc += detail::exact_panel_part1(cr, zr, r - zr, x, gamma);
      }
      // inside (x-eps, x+eps): plateau piece exact, transitions adaptive
      const double a1 = std::max(l, zl), b1 = std::min(r, zr);
      const double pl = x - 0.75 * eps, pr = x + 0.75 * eps;
      auto seg = [&](double sa, double sb, bool plateau) {
        if (sb <= sa) return;
        if (plateau) {
          acc += reg->plateau_value() * detail::cubic_integral(c, sa - l, sb - l);
        } else {
          acc += integrate_smooth(
              [&](double y) { return wfun(y) * (*reg)(x - y); }, sa, sb, spec);
        }
      };
      seg(a1, std::min(b1, pl), false);
      seg(std::max(a1, pl), std::min(b1, pr), true);
      seg(std::max(a1, pr), b1, false);
    }

    // part 2: k(x + y)
    const bool zone2 = reg && (l < eps - x);
    if (!zone2) {
      acc += sgn2 * detail::exact_panel_part2(c, l, h, x, gamma);
    } else {
      auto wfun = [&](double y) {
        const double t = y - l;
        return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
      };
      const double ze = eps - x;          // zone end in y
      const double zp = 0.75 * eps - x;   // plateau end in y
      auto seg = [&](double sa, double sb, bool plateau) {
        if (sb <= sa) return;
        if (plateau) {
          acc += sgn2 * reg->plateau_value() *
                 detail::cubic_integral(c, sa - l, sb - l);
        } else {
          acc += sgn2 * integrate_smooth(
                            [&](double y) { return wfun(y) * (*reg)(x + y); },
                            sa, sb, spec);
        }
      };
      seg(l, std::min(r, zp), true);
      seg(std::max(l, zp), std::min(r, ze), false);
      if (r > ze) {
        double cr[4];
        detail::recenter_cubic(c, ze - l, cr);
        acc += sgn2 * detail::exact_panel_part2(cr, ze, r - ze, x, gamma);
      }
    }
  }

  // bridge [xN, Rs] + analytic far tail
  double Rs = std::max(xN, 2.5 * x);
  if (reg) Rs = std::max(Rs, x + 2.0 * eps);
  if (Rs > xN * (1.0 + 1e-15)) {
    auto g = [&](double y) { return tail.eval(y); };
    if (reg) {
      std::vector<double> cuts = {xN, Rs};
      for (double b : {x - eps, x - 0.75 * eps, x + 0.75 * eps, x + eps})
        if (b > xN && b < Rs) cuts.push_back(b);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        acc += integrate_smooth(
            [&](double y) {
              return g(y) * ((*reg)(x - y) + sgn2 * (*reg)(x + y));
            },
            cuts[k], cuts[k + 1], spec);
    } else if (x >= xN) {
      acc += integrate_endpoint_singular(g, xN, x, x, gamma, spec);
      acc += integrate_endpoint_singular(g, x, Rs, x, gamma, spec);
      acc += sgn2 * integrate_smooth(
                        [&](double y) { return g(y) * std::pow(x + y, -gamma); },
                        xN, Rs, spec);
    } else {
      acc += integrate_smooth(
          [&](double y) {
            const double k1 = std::pow(std::abs(y - x), -gamma);
            const double k2 = std::pow(x + y, -gamma);
            return g(y) * (comb == KernelCombination::difference
                               ? kernel_diff(x, y, gamma)
                               : k1 + k2);
          },
          xN, Rs, spec);
    }
  }

  if (tail.is_pure_power()) {
    acc += detail::kernel_tail_series(comb, tail.coefficient, tail.exponent, x,
                                      Rs, gamma);
  } else {
    for (const auto& term : tail.terms) {
      if (term.coef == 0.0) continue;
      const double beta = (comb == KernelCombination::difference)
                              ? 1.0 + gamma - term.exponent
                              : gamma - term.exponent;
      acc += integrate_tail(
          [&](double y) {
            const double atom =
                term.coef * std::pow(y + term.shift, term.exponent);
            return atom * (comb == KernelCombination::difference
                               ? kernel_diff(x, y, gamma)
                               : kernel_sum(x, y, gamma));
          },
          Rs, beta, spec);
    }
  }
  return acc;
}

// Nonlocal velocity u[omega](x) = -int_0^inf K(x,y) omega(y) dy on x >= 0.
// Exactly zero at x = 0; <= 0 whenever omega >= 0.
inline double velocity(const OddProfile& omega, double x, double gamma,
                       const QuadratureSpec& spec = {}) {
  if (!(x >= 0.0)) throw std::invalid_argument("velocity: requires x >= 0");
  if (!(omega.tail_exponent() < gamma))
    throw DivergentTailError(
        "velocity: tail exponent must satisfy q < gamma for convergence");
  if (x == 0.0) return 0.0;
  return -convolve_profile(omega.interpolant(), omega.tail(), x, gamma, spec,
                           KernelCombination::difference);
}

// u[omega]_x(x) = -int_0^inf omega_x(y) (|x-y|^{-g} + |x+y|^{-g}) dy from a
// separately supplied derivative profile (even on x >= 0).
inline double velocity_x(const EvenProfile& omega_x, double x, double gamma,
                         const QuadratureSpec& spec = {}) {
  if (!(x >= 0.0)) throw std::invalid_argument("velocity_x: requires x >= 0");
  if (!(omega_x.tail().exponent < gamma - 1.0))
    throw DivergentTailError(
        "velocity_x: derivative tail exponent must satisfy q-1 < gamma-1");
  return -convolve_profile(omega_x.interpolant(), omega_x.tail(), x, gamma,
                           spec, KernelCombination::sum);
}

// Regularized velocity v_eps[omega](x) with the bounded kernel k_eps.
inline double regularized_velocity(const OddProfile& omega, double x,
                                   const RegKernel& kernel,
                                   const QuadratureSpec& spec = {}) {
  if (!(x >= 0.0))
    throw std::invalid_argument("regularized_velocity: requires x >= 0");
  if (!(omega.tail_exponent() < kernel.gamma))
    throw DivergentTailError("regularized_velocity: divergent tail");
  if (x == 0.0) return 0.0;
  return -convolve_profile(omega.interpolant(), omega.tail(), x, kernel.gamma,
                           spec, KernelCombination::difference, &kernel);
}

inline double regularized_velocity_x(const EvenProfile& omega_x, double x,
                                     const RegKernel& kernel,
                                     const QuadratureSpec& spec = {}) {
  if (!(x >= 0.0))
    throw std::invalid_argument("regularized_velocity_x: requires x >= 0");
  return -convolve_profile(omega_x.interpolant(), omega_x.tail(), x,
                           kernel.gamma, spec, KernelCombination::sum,
                           &kernel);
}

// u_x[omega](0) = -2 gamma int_0^inf y^{-1-gamma} omega(y) dy (integration by
// parts of -2 int y^{-gamma} omega_x dy; boundary terms vanish for odd data
// with q < gamma). Avoids differentiating the interpolant.
inline double velocity_gradient_at_origin(const OddProfile& omega, double gamma,
                                          const QuadratureSpec& spec = {}) {
  if (!(omega.tail_exponent() < gamma))
    throw DivergentTailError("velocity_gradient_at_origin: divergent tail");
  const auto& interp = omega.interpolant();
  const auto& X = interp.nodes();
  double acc = 0.0;
  const double nu = 1.0 + gamma;
  for (std::size_t i = 0; i + 1 < X.size(); ++i) {
    const double l = X[i], h = X[i + 1] - X[i];
    double c[4];
    interp.piece(i, c[0], c[1], c[2], c[3]);
    if (i == 0) {
      // omega(y)/y is a clean quadratic here since omega(0) = 0 exactly
      const double a[4] = {c[1], c[2], c[3], 0.0};
      acc += detail::power_panel(a, 0.0, 0.0, h, std::pow(h, 1.0 - gamma),
                                 gamma);
      continue;
    }
    if (l >= 2.0 * h) {
      acc += detail::series_panel(c, h, l, std::pow(l, -nu), nu);
    } else {
      double a[4];
      detail::recenter_cubic(c, -l, a);  // about the origin, s = y
      const double omn = 1.0 - nu;  // negative exponent is fine here: l > 0
      acc += detail::power_panel(a, l, std::pow(l, omn), l + h,
                                 std::pow(l + h, omn), nu);
    }
  }
  const auto& tail = omega.tail();
  if (tail.is_pure_power()) {
    acc += tail.coefficient *
           std::pow(X.back(), tail.exponent - gamma) / (gamma - tail.exponent);
  } else {
    for (const auto& term : tail.terms) {
      if (term.coef == 0.0) continue;
      acc += integrate_tail(
          [&](double y) {
            return term.coef * std::pow(y + term.shift, term.exponent) *
                   std::pow(y, -nu);
          },
          X.back(), 1.0 + gamma - term.exponent, spec);
    }
  }
  return -2.0 * gamma * acc;
}

// Velocity sweep at all node positions of a particle state; slot tau gets
// u(X_tau). Parallel over targets, deterministic for any worker count.
inline void velocity_sweep(const MonotoneCubic& interp, const TailModel& tail,
                           double gamma, const QuadratureSpec& spec,
                           const RegKernel* reg, std::vector<double>& out) {
  const auto& X = interp.nodes();
  out.assign(X.size(), 0.0);
  parallel_for(X.size(), [&](std::size_t tau) {
    const double x = X[tau];
    out[tau] = (x == 0.0) ? 0.0
                          : -convolve_profile(interp, tail, x, gamma, spec,
                                              KernelCombination::difference,
                                              reg);
  });
}

// Smooth-integrand route for closed-form data: int_0^inf kern(x,y) g(y) dy
// with the singular point handled by the change-of-variables quadrature and
// the far field by the compactified tail. growth_q bounds g: |g(y)| <~ y^q.
inline double halfline_kernel_integral(const std::function<double(double)>& g,
                                       double growth_q, double x, double gamma,
                                       const QuadratureSpec& spec,
                                       KernelCombination comb) {
  if (!(x > 0.0))
    throw std::invalid_argument("halfline_kernel_integral: requires x > 0");
  const double sgn2 = (comb == KernelCombination::difference) ? -1.0 : 1.0;
  const double half =
      std::clamp(0.5 * spec.singular_split_radius_factor, 1e-3, 0.75);
  const double hrad = half * x;
  const double R_far = std::max(2.0 * (x + 1.0), 4.0);
  double acc = 0.0;
  auto combined = [&](double y) {
    return g(y) * (comb == KernelCombination::difference
                       ? kernel_diff(x, y, gamma)
                       : kernel_sum(x, y, gamma));
  };
  if (x - hrad > 0.0) acc += integrate_smooth(combined, 0.0, x - hrad, spec);
  acc += integrate_endpoint_singular(g, x - hrad, x, x, gamma, spec);
  acc += integrate_endpoint_singular(g, x, x + hrad, x, gamma, spec);
  acc += sgn2 * integrate_smooth(
                    [&](double y) { return g(y) * std::pow(x + y, -gamma); },
                    x - hrad, x + hrad, spec);
  acc += integrate_smooth(combined, x + hrad, R_far, spec);
  const double beta = (comb == KernelCombination::difference)
                          ? 1.0 + gamma - growth_q
                          : gamma - growth_q;
  acc += integrate_tail(combined, R_far, beta, spec);
  return acc;
}

}  // namespace alphapatch
