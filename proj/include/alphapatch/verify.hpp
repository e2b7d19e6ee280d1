#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphapatch/barrier.hpp"
#include "alphapatch/initial_data.hpp"
#include "alphapatch/io.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

struct VerificationReport {
  std::string check;
  bool pass = false;
  std::map<std::string, double> measured;
  std::optional<std::pair<double, double>> first_violation;  // (t, x)
  std::string detail;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["status"] = pass ? "pass" : "fail";
    j["measured"] = measured;
    if (first_violation)
      j["first_violation"] = {{"t", first_violation->first},
                              {"x", first_violation->second}};
    else
      j["first_violation"] = nullptr;
    if (!detail.empty()) j["detail"] = detail;
    return j;
  }
};

namespace detail {

inline OddProfile snapshot_profile(const Snapshot& s, const TailModel& tail) {
  return OddProfile(s.positions, s.values, tail, TailContinuity::relaxed);
}

inline TailModel artifact_tail(const RunArtifacts& art) {
  const auto& s0 = art.snapshots.front();
  const double q = art.config.params.q;
  return TailModel::power_law(
      q, s0.values.back() / std::pow(s0.positions.back(), q));
}

}  // namespace detail

// omega(t, x) > phi(t, x) for all x > 0 at every snapshot, checked at the
// nodes, at interpolant midpoints, and at far-field tail stations.
inline VerificationReport verify_barrier_dominance(const RunArtifacts& art) {
  VerificationReport rep;
  rep.check = "verify_barrier_dominance";
  if (art.snapshots.size() < 2)
    throw std::invalid_argument("verify_barrier_dominance: need >= 2 snapshots");
  const Barrier& b = art.config.barrier;
  const TailModel tail = detail::artifact_tail(art);
  double min_margin = std::numeric_limits<double>::infinity();
  double min_tail_gap = std::numeric_limits<double>::infinity();
  for (const auto& snap : art.snapshots) {
    const double a = b.scale(std::min(snap.time, b.t_singular()));
    OddProfile omega = detail::snapshot_profile(snap, tail);
    auto margin = [&](double x, double w) {
      return w - phi_value(a, b.p, x);
    };
    for (std::size_t i = 1; i < snap.positions.size(); ++i) {
      const double m = margin(snap.positions[i], snap.values[i]);
      if (m < min_margin) min_margin = m;
      if (!(m > 0.0) && !rep.first_violation)
        rep.first_violation = {snap.time, snap.positions[i]};
      if (i + 1 < snap.positions.size()) {
        const double xm = 0.5 * (snap.positions[i] + snap.positions[i + 1]);
        const double mm = margin(xm, omega.eval(xm));
        if (mm < min_margin) min_margin = mm;
        if (!(mm > 0.0) && !rep.first_violation)
          rep.first_violation = {snap.time, xm};
      }
    }
    for (double f : {2.0, 10.0}) {
      const double y = snap.positions.back() * f;
      min_tail_gap = std::min(min_tail_gap, margin(y, tail.eval(y)));
    }
  }
  rep.measured["min_margin"] = min_margin;
  rep.measured["min_tail_gap"] = min_tail_gap;
  rep.pass = !rep.first_violation && min_margin > 0.0 && min_tail_gap > 0.0;
  if (rep.first_violation) {
    rep.measured["t_star"] = rep.first_violation->first;
    rep.detail = "first crossing at t = " +
                 std::to_string(rep.first_violation->first) + ", x = " +
                 std::to_string(rep.first_violation->second);
  }
  return rep;
}

// d/dt ln omega_x(t,0) = -u_x[omega](t,0): compares the logged slope change
// against the trapezoidal integral of the logged velocity gradient. Also
// checks the comparison bound -u_x[omega](0) >= -u_x[phi](0) when the run
// dominated the barrier.
inline VerificationReport verify_origin_slope_ode(
    const RunArtifacts& art, double rel_tol = 0.02,
    const QuadratureSpec& spec = {}) {
  VerificationReport rep;
  rep.check = "verify_origin_slope_ode";
  const auto& recs = art.diagnostics;
  bool all_zero = true;
  for (const auto& r : recs)
    if (r.slope_origin != 0.0 || r.u_x_origin != 0.0) all_zero = false;
  if (all_zero) {
    rep.pass = true;
    rep.measured["relative_deviation"] = 0.0;
    rep.detail = "stationary zero solution: both sides vanish";
    return rep;
  }
  std::size_t positive = 0;
  for (const auto& r : recs)
    if (r.slope_origin > 0.0) ++positive;
  if (positive < 10 || positive != recs.size())
    throw std::invalid_argument(
        "verify_origin_slope_ode: needs >= 10 records with positive slopes");
  const double dlog =
      std::log(recs.back().slope_origin) - std::log(recs.front().slope_origin);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k)
    integral += 0.5 * (recs[k + 1].time - recs[k].time) *
                (-recs[k].u_x_origin - recs[k + 1].u_x_origin);
  const double dev = std::abs(dlog - integral) / std::abs(dlog);
  rep.measured["delta_log_slope"] = dlog;
  rep.measured["integral_minus_ux"] = integral;
  rep.measured["relative_deviation"] = dev;
  rep.pass = dev <= rel_tol;

  if (art.barrier_armed) {
    // -u_x[omega](0) >= -u_x[phi](0) = a^{p-gamma} U'(0) under dominance
    const Barrier& b = art.config.barrier;
    const double up0 =
        U_prime_at_zero(art.config.params.gamma, art.config.params.p, spec);
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      const double a = b.scale(std::min(r.time, b.t_singular()));
      const double phi_side =
          std::pow(a, b.p - art.config.params.gamma) * up0;
      min_gap = std::min(min_gap, -r.u_x_origin - phi_side);
    }
    rep.measured["min_comparison_gap"] = min_gap;
    if (!(min_gap > -1e-9)) rep.pass = false;
  }
  return rep;
}

// |v_eps - u| at the sample points for a decreasing eps ladder: reports the
// fitted convergence order (expected 1-gamma +- 0.2), monotone decrease, and
// the growth of the Lipschitz-type ratio ||d_x v_eps||_{-gamma+p} / ||w||_p.
inline VerificationReport verify_regularization_convergence(
    const OddProfile& omega, const EvenProfile& omega_x,
    const std::vector<double>& x_samples, const std::vector<double>& eps_seq,
    double gamma, double p, const QuadratureSpec& spec = {}) {
  VerificationReport rep;
  rep.check = "verify_regularization_convergence";
  if (eps_seq.size() < 4)
    throw std::invalid_argument("need >= 4 epsilon values");
  for (std::size_t i = 0; i + 1 < eps_seq.size(); ++i)
    if (!(eps_seq[i + 1] < eps_seq[i]))
      throw std::invalid_argument("eps sequence must strictly decrease");

  bool pass = true;
  double min_order = std::numeric_limits<double>::infinity();
  double max_order = -std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    const double u = velocity(omega, x, gamma, spec);
    std::vector<double> logs_e, logs_err;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : eps_seq) {
      RegKernel k(eps, gamma);
      const double err =
          std::abs(regularized_velocity(omega, x, k, spec) - u);
      if (!(err < prev)) pass = false;  // monotone decrease in eps
      prev = err;
      logs_e.push_back(std::log(eps));
      logs_err.push_back(std::log(std::max(err, 1e-300)));
    }
    // least-squares slope of log err vs log eps
    double se = 0, sy = 0, see = 0, sey = 0;
    const double n = double(logs_e.size());
    for (std::size_t i = 0; i < logs_e.size(); ++i) {
      se += logs_e[i];
      sy += logs_err[i];
      see += logs_e[i] * logs_e[i];
      sey += logs_e[i] * logs_err[i];
    }
    const double order = (n * sey - se * sy) / (n * see - se * se);
    min_order = std::min(min_order, order);
    max_order = std::max(max_order, order);
    if (std::abs(order - (1.0 - gamma)) > 0.2) pass = false;
  }
  rep.measured["min_fitted_order"] = min_order;
  rep.measured["max_fitted_order"] = max_order;
  rep.measured["expected_order"] = 1.0 - gamma;

  // Lipschitz-type ratio must grow as eps shrinks (the eps-dependent bound)
  const double wnorm = weighted_norm(omega, p);
  std::vector<double> grid;
  for (double x = 1e-3; x <= 4.0 * omega.x_max(); x *= 1.6) grid.push_back(x);
  double prev_ratio = 0.0;
  bool increasing = true;
  for (double eps : eps_seq) {
    RegKernel k(eps, gamma);
    double sup = 0.0;
    for (double x : grid)
      sup = std::max(sup, std::abs(regularized_velocity_x(omega_x, x, k, spec)) *
                              std::pow(1.0 + x, gamma - p));
    const double ratio = sup / wnorm;
    if (ratio <= prev_ratio) increasing = false;
    prev_ratio = ratio;
    rep.measured["lipschitz_ratio_eps_" + std::to_string(eps)] = ratio;
  }
  if (!increasing) pass = false;
  rep.measured["lipschitz_ratio_increasing"] = increasing ? 1.0 : 0.0;
  rep.pass = pass;
  return rep;
}

// Rate bound along trajectories: d/dt[(1+X)^{-p} omega] stays on the scale
// K ||omega||_p^2, with the empirical constant stable across run halves.
inline VerificationReport apriori_monitor(const RunArtifacts& art) {
  VerificationReport rep;
  rep.check = "apriori_monitor";
  const double p = art.config.params.p;
  const auto& snaps = art.snapshots;
  if (snaps.size() < 3) {
    rep.pass = false;
    rep.detail = "needs >= 3 snapshots";
    return rep;
  }
  const TailModel tail = detail::artifact_tail(art);
  double khat_first = 0.0, khat_second = 0.0;
  double min_rate = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const auto& s0 = snaps[k];
    const auto& s1 = snaps[k + 1];
    const double dt = s1.time - s0.time;
    if (!(dt > 0.0)) continue;
    const double norm = weighted_norm(detail::snapshot_profile(s0, tail), p);
    if (!(norm > 0.0)) continue;
    double max_rate = 0.0;
    for (std::size_t i = 0; i < s0.positions.size(); ++i) {
      const double r = (std::pow(1.0 + s1.positions[i], -p) -
                        std::pow(1.0 + s0.positions[i], -p)) *
                       s0.values[i] / dt;
      max_rate = std::max(max_rate, std::abs(r));
      min_rate = std::min(min_rate, r);
    }
    const double khat = max_rate / (norm * norm);
    any = true;
    if (k < (snaps.size() - 1) / 2)
      khat_first = std::max(khat_first, khat);
    else
      khat_second = std::max(khat_second, khat);
  }
  if (!any) {
    rep.pass = true;  // zero solution: all rates vanish
    rep.measured["khat"] = 0.0;
    rep.detail = "all rates zero";
    return rep;
  }
  rep.measured["khat_first_half"] = khat_first;
  rep.measured["khat_second_half"] = khat_second;
  rep.measured["min_rate"] = min_rate;
  const double ref = std::max(khat_first, khat_second);
  rep.pass = ref > 0.0 &&
             std::abs(khat_first - khat_second) <= 0.10 * ref &&
             min_rate > -1e-9 * ref;
  return rep;
}

// Measured operator-norm ratios of the velocity law over a test family, with
// node-refinement stability and the directly computed first-line constant
// C = int_0^inf K(1,z)(1+z)^q dz as an upper bound.
struct VelocityBoundFamilyMember {
  std::string name;
  std::function<double(double)> w, wx, wxx;
  std::function<OddProfile(std::size_t)> make_profile;
  std::function<EvenProfile(std::size_t)> make_derivative;
};

inline VerificationReport verify_velocity_bounds(double gamma, double q,
                                                 std::size_t n_nodes,
                                                 double x_max,
                                                 const QuadratureSpec& spec =
                                                     {}) {
  VerificationReport rep;
  rep.check = "verify_velocity_bounds";
  if (!(q < gamma))
    throw std::invalid_argument("verify_velocity_bounds: requires q < gamma");

  auto grid = [&]() {
    std::vector<double> xs;
    for (double x = 1e-2; x <= 2.0 * x_max; x *= 1.45) xs.push_back(x);
    return xs;
  }();

  std::vector<VelocityBoundFamilyMember> family;
  {
    VelocityBoundFamilyMember m;
    m.name = "saturating_power";
    m.w = [q](double x) { return x * std::pow(1.0 + x, q - 1.0); };
    m.wx = [q](double x) {
      return std::pow(1.0 + x, q - 2.0) * (1.0 + q * x);
    };
    m.wxx = [q](double x) {
      return (q - 1.0) * std::pow(1.0 + x, q - 3.0) * (2.0 + q * x);
    };
    m.make_profile = [q, x_max](std::size_t n) {
      auto xs = graded_nodes(n, x_max, 3.0);
      std::vector<double> vs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        vs[i] = xs[i] * std::pow(1.0 + xs[i], q - 1.0);
      auto tail =
          TailModel::from_terms(q, 1.0, {{1.0, 1.0, q}, {-1.0, 1.0, q - 1.0}});
      return OddProfile(xs, vs, tail);
    };
    m.make_derivative = [q, x_max](std::size_t n) {
      auto xs = graded_nodes(n, x_max, 3.0);
      std::vector<double> vs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        vs[i] = std::pow(1.0 + xs[i], q - 2.0) * (1.0 + q * xs[i]);
      auto tail = TailModel::from_terms(
          q - 1.0, q, {{q, 1.0, q - 1.0}, {1.0 - q, 1.0, q - 2.0}});
      return EvenProfile(xs, vs, tail);
    };
    family.push_back(std::move(m));
  }
  {
    VelocityBoundFamilyMember m;
    m.name = "barrier_profile";
    const double p = q;
    m.w = [p](double x) { return phi_value(1.0, p, x); };
    m.wx = [p](double x) { return phi_x(1.0, p, x); };
    m.wxx = [p](double x) {
      return p * (p - 1.0) * std::pow(1.0 + x, p - 2.0);
    };
    m.make_profile = [p, x_max](std::size_t n) {
      return sample_phi_profile(1.0, p, 1.0, n, x_max, 3.0);
    };
    m.make_derivative = [p, x_max](std::size_t n) {
      return sample_phi_derivative(1.0, p, 1.0, n, x_max, 3.0);
    };
    family.push_back(std::move(m));
  }
  {
    VelocityBoundFamilyMember m;
    m.name = "smooth_rational";
    const double p = q;
    m.w = [p](double x) {
      return x * std::pow(1.0 + x * x, 0.5 * (p - 1.0));
    };
    m.wx = [p](double x) {
      return std::pow(1.0 + x * x, 0.5 * (p - 3.0)) * (1.0 + p * x * x);
    };
    m.wxx = [p](double x) {
      return (p - 1.0) * x * std::pow(1.0 + x * x, 0.5 * (p - 5.0)) *
             (3.0 + p * x * x);
    };
    m.make_profile = [p, x_max, this_w = m.w](std::size_t n) {
      auto xs = graded_nodes(n, x_max, 3.0);
      std::vector<double> vs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = this_w(xs[i]);
      return OddProfile(
          xs, vs, TailModel::power_law(p, vs.back() / std::pow(x_max, p)));
    };
    m.make_derivative = [p, x_max, this_wx = m.wx](std::size_t n) {
      auto xs = graded_nodes(n, x_max, 3.0);
      std::vector<double> vs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = this_wx(xs[i]);
      return EvenProfile(xs, vs,
                         TailModel::power_law(
                             p - 1.0, vs.back() / std::pow(x_max, p - 1.0)));
    };
    family.push_back(std::move(m));
  }

  const double s1 = 1.0 - gamma + q;
  const double s2 = -gamma + q;
  const double s3 = -gamma + q - 1.0;
  bool pass = true;
  double max_ratio1 = 0.0;
  for (const auto& m : family) {
    double r1[2], r2[2], r3[2];
    for (int lvl = 0; lvl < 2; ++lvl) {
      const std::size_t n = lvl == 0 ? n_nodes : 2 * n_nodes - 1;
      auto omega = m.make_profile(n);
      auto deriv = m.make_derivative(n);
      const double nw = weighted_norm(omega, q);
      const double nwx = weighted_norm(deriv, q - 1.0);
      if (nw == 0.0 || nwx == 0.0) {  // identically zero member: vacuous
        r1[lvl] = r2[lvl] = r3[lvl] = 0.0;
        continue;
      }
      double su = 0.0, sux = 0.0, suxx = 0.0, nwxx = 0.0;
      for (double x : grid) {
        su = std::max(su, std::abs(velocity(omega, x, gamma, spec)) *
                              std::pow(1.0 + x, -s1));
        sux = std::max(sux, std::abs(velocity_x(deriv, x, gamma, spec)) *
                                std::pow(1.0 + x, -s2));
        const double uxx = -halfline_kernel_integral(
            m.wxx, q - 2.0, x, gamma, spec, KernelCombination::difference);
        suxx =
            std::max(suxx, std::abs(uxx) * std::pow(1.0 + x, -s3));
        nwxx = std::max(nwxx,
                        std::abs(m.wxx(x)) * std::pow(1.0 + x, -(q - 2.0)));
      }
      nwxx = std::max(nwxx, std::abs(m.wxx(0.0)));
      r1[lvl] = su / nw;
      r2[lvl] = sux / nwx;
      r3[lvl] = suxx / nwxx;
    }
    rep.measured["ratio1_" + m.name] = r1[1];
    rep.measured["ratio2_" + m.name] = r2[1];
    rep.measured["ratio3_" + m.name] = r3[1];
    for (auto* r : {&r1[0], &r2[0], &r3[0]}) {
      if (!std::isfinite(*r)) pass = false;
    }
    if (std::abs(r1[0] - r1[1]) > 0.05 * r1[1]) pass = false;
    if (std::abs(r2[0] - r2[1]) > 0.05 * r2[1]) pass = false;
    if (std::abs(r3[0] - r3[1]) > 0.05 * r3[1]) pass = false;
    max_ratio1 = std::max(max_ratio1, r1[1]);
  }
  // directly computed constant from the first-line derivation
  const double C_exact = halfline_kernel_integral(
      [q](double z) { return std::pow(1.0 + z, q); }, q, 1.0, gamma, spec,
      KernelCombination::difference);
  rep.measured["max_ratio1"] = max_ratio1;
  rep.measured["C_exact"] = C_exact;
  if (!(max_ratio1 <= C_exact)) pass = false;
  rep.pass = pass;
  return rep;
}

}  // namespace alphapatch
