#pragma once

#include <cmath>
#include <vector>

#include "alphapatch/profile.hpp"
#include "alphapatch/solver.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

struct PicardResult {
  std::vector<double> times;               // n_time_nodes values in [0, T]
  std::vector<double> labels;              // z_j = initial node positions
  std::vector<std::vector<double>> flow;   // flow[k][j] = Phi(t_k, z_j)
  std::vector<double> residuals;           // sup-norm update per iteration
  OddProfile final_profile;                // transported profile at t = T
  bool converged = false;
  int iterations = 0;
};

// Picard iteration on the regularized flow-map fixed point
//   Phi(t,z) = z + int_0^t v_eps[omega_Phi(.,s)](Phi(s,z)) ds,
// starting from Phi = Id on a (time x label) grid. omega_Phi = omega0 o
// Phi^{-1} is realized by transporting carried values: along the samples,
// omega_Phi(t, Phi(t,z)) = omega0(z). The time integral is composite
// trapezoidal on the time nodes.
inline PicardResult picard_flow_map(const OddProfile& omega0,
                                    double reg_epsilon, double T,
                                    double gamma, int n_time_nodes = 32,
                                    int max_iter = 40, double tol = 1e-8,
                                    const QuadratureSpec& spec = {}) {
  if (!(reg_epsilon > 0.0))
    throw std::invalid_argument("picard_flow_map: reg_epsilon must be > 0");
  if (!(T > 0.0) || n_time_nodes < 2)
    throw std::invalid_argument("picard_flow_map: need T > 0 and >= 2 nodes");
  const RegKernel kernel(reg_epsilon, gamma);

  PicardResult out;
  out.labels = omega0.nodes();
  const std::size_t nz = out.labels.size();
  const std::size_t nt = static_cast<std::size_t>(n_time_nodes);
  out.times.resize(nt);
  for (std::size_t k = 0; k < nt; ++k)
    out.times[k] = T * double(k) / double(nt - 1);
  const double dt = T / double(nt - 1);

  out.flow.assign(nt, out.labels);
  std::vector<std::vector<double>> v(nt, std::vector<double>(nz, 0.0));
  std::vector<std::vector<double>> next(nt, std::vector<double>(nz, 0.0));

  for (int it = 1; it <= max_iter; ++it) {
    // velocity field of the current iterate at every time node
    for (std::size_t k = 0; k < nt; ++k) {
      for (std::size_t j = 0; j + 1 < nz; ++j)
        if (!(out.flow[k][j] < out.flow[k][j + 1]))
          throw OrderingError("picard_flow_map: flow samples crossed");
      MonotoneCubic interp(out.flow[k], omega0.values());
      velocity_sweep(interp, omega0.tail(), gamma, spec, &kernel, v[k]);
    }
    // Phi_{m+1}(t_k, z_j) = z_j + cumulative trapezoid of v over s <= t_k
    double residual = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
      double integral = 0.0;
      next[0][j] = out.labels[j];
      for (std::size_t k = 1; k < nt; ++k) {
        integral += 0.5 * dt * (v[k - 1][j] + v[k][j]);
        next[k][j] = out.labels[j] + integral;
      }
    }
    for (std::size_t k = 0; k < nt; ++k)
      for (std::size_t j = 0; j < nz; ++j)
        residual = std::max(residual, std::abs(next[k][j] - out.flow[k][j]));
    out.flow.swap(next);
    out.residuals.push_back(residual);
    out.iterations = it;
    if (residual < tol) {
      out.converged = true;
      break;
    }
  }

  out.final_profile = OddProfile(out.flow[nt - 1], omega0.values(),
                                 omega0.tail(), TailContinuity::relaxed);
  return out;
}

}  // namespace alphapatch
