#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "alphapatch/barrier.hpp"
#include "alphapatch/params.hpp"
#include "alphapatch/profile.hpp"

namespace alphapatch {

struct DominanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InitialDataKind { zero, barrier_multiple, smooth_rational };

inline InitialDataKind initial_data_kind_from_name(const std::string& name) {
  if (name == "zero") return InitialDataKind::zero;
  if (name == "barrier_multiple") return InitialDataKind::barrier_multiple;
  if (name == "smooth_rational") return InitialDataKind::smooth_rational;
  throw ConfigError("unknown initial data kind '" + name + "'");
}

namespace detail {

// Strict dominance omega0 > (1+eps) phi(0,.) at every positive node and a few
// tail stations; reports the first violating x.
inline void check_dominance(const OddProfile& omega0, const ModelParams& params,
                            const Barrier& barrier) {
  const double eps = params.margin_epsilon;
  auto phi0 = [&](double x) { return phi_value(barrier.a0, barrier.p, x); };
  const auto& xs = omega0.nodes();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double lhs = omega0.values()[i];
    const double rhs = (1.0 + eps) * phi0(xs[i]);
    if (!(lhs > rhs))
      throw DominanceError("initial data fails dominance at x=" +
                           std::to_string(xs[i]) + " (omega0=" +
                           std::to_string(lhs) + " <= (1+eps)phi=" +
                           std::to_string(rhs) + ")");
  }
  for (double f : {2.0, 10.0, 100.0}) {
    const double y = omega0.x_max() * f;
    if (!(omega0.eval(y) > (1.0 + eps) * phi0(y)))
      throw DominanceError("initial data fails tail dominance at x=" +
                           std::to_string(y));
  }
}

}  // namespace detail

// Initial data generators. barrier_multiple: (1+2 eps)((x+a0)^p - a0^p);
// smooth_rational: A x (1+x^2)^{(p-1)/2} with A auto-scaled for dominance.
// The tail model is the power law params.q fitted at the last node.
inline OddProfile build_initial_data(InitialDataKind kind,
                                     const ModelParams& params,
                                     const Barrier& barrier,
                                     std::size_t n_particles, double x_max,
                                     double grading_power,
                                     double amplitude_override = 0.0) {
  auto xs = graded_nodes(n_particles, x_max, grading_power);
  std::vector<double> vs(xs.size(), 0.0);
  const double eps = params.margin_epsilon;
  const double p = barrier.p;

  switch (kind) {
    case InitialDataKind::zero: {
      return OddProfile(xs, vs, TailModel::power_law(params.q, 0.0));
    }
    case InitialDataKind::barrier_multiple: {
      const double k = 1.0 + 2.0 * eps;
      for (std::size_t i = 0; i < xs.size(); ++i)
        vs[i] = k * phi_value(barrier.a0, p, xs[i]);
      break;
    }
    case InitialDataKind::smooth_rational: {
      auto shape = [p](double x) {
        return x * std::pow(1.0 + x * x, 0.5 * (p - 1.0));
      };
      double A = amplitude_override;
      if (A <= 0.0) {
        // sup of (1+eps) phi / shape over a dense log grid; the large-x limit
        // of the quotient is (1+eps), the small-x limit (1+eps) p a0^{p-1}.
        double sup = 1.0 + eps;
        for (double x = 1e-4 * x_max; x <= 100.0 * x_max; x *= 1.05) {
          const double quot =
              (1.0 + eps) * phi_value(barrier.a0, p, x) / shape(x);
          sup = std::max(sup, quot);
        }
        A = 1.05 * sup;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = A * shape(xs[i]);
      break;
    }
  }

  const double A_tail = vs.back() / std::pow(x_max, params.q);
  OddProfile omega0(xs, vs, TailModel::power_law(params.q, A_tail));
  detail::check_dominance(omega0, params, barrier);
  return omega0;
}

// Sampled barrier profile k * phi(a, x) with the exact algebraic tail
// k((y+a)^p - a^p) carried beyond the last node. Used wherever the far field
// must match the closed form (scaling-identity and convergence checks).
inline OddProfile sample_phi_profile(double a, double p, double k,
                                     std::size_t n_nodes, double x_max,
                                     double grading_power) {
  auto xs = graded_nodes(n_nodes, x_max, grading_power);
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    vs[i] = k * phi_value(a, p, xs[i]);
  auto tail = TailModel::from_terms(
      p, k, {{k, a, p}, {-k * std::pow(a, p), 0.0, 0.0}});
  return OddProfile(xs, vs, tail);
}

// Matching derivative profile k phi_x(a, .) = k p (y+a)^{p-1}, even on x >= 0.
inline EvenProfile sample_phi_derivative(double a, double p, double k,
                                         std::size_t n_nodes, double x_max,
                                         double grading_power) {
  auto xs = graded_nodes(n_nodes, x_max, grading_power);
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    vs[i] = k * phi_x(a, p, xs[i]);
  auto tail =
      TailModel::from_terms(p - 1.0, k * p, {{k * p, a, p - 1.0}});
  return EvenProfile(xs, vs, tail);
}

}  // namespace alphapatch
