#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "alphapatch/config.hpp"
#include "alphapatch/profile.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

struct OrderingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lagrangian markers: positions evolve, carried values never change.
struct ParticleState {
  double time = 0.0;
  std::vector<double> positions;       // X_0 = 0, strictly increasing
  std::vector<double> carried_values;  // immutable along trajectories
  TailModel tail;

  static ParticleState from_profile(const OddProfile& omega, double t0 = 0.0) {
    ParticleState s;
    s.time = t0;
    s.positions = omega.nodes();
    s.carried_values = omega.values();
    s.tail = omega.tail();
    return s;
  }

  void check_ordering() const {
    if (positions.empty() || positions.front() != 0.0)
      throw OrderingError("ParticleState: X_0 must remain 0");
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
      if (!(positions[i] < positions[i + 1]))
        throw OrderingError("particle ordering violated at index " +
                            std::to_string(i) +
                            " (X=" + std::to_string(positions[i]) + ")");
  }

  OddProfile to_profile() const {
    return OddProfile(positions, carried_values, tail,
                      TailContinuity::relaxed);
  }

  double min_spacing() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
      m = std::min(m, positions[i + 1] - positions[i]);
    return m;
  }
};

// Per-step monitors.
struct DiagnosticsRecord {
  double time = 0.0;
  double slope_origin = 0.0;
  double norm_p = 0.0;
  double norm_x_pm1 = 0.0;
  double barrier_margin = 0.0;
  double dt = 0.0;
  double velocity_min = 0.0;
  double u_x_origin = 0.0;  // logged to a separate artifact
};

enum class StopReason {
  time_end,
  slope_blowup,
  resolution_exhausted,
  barrier_violation,
  ordering_violation
};

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::time_end: return "time_end";
    case StopReason::slope_blowup: return "slope_blowup";
    case StopReason::resolution_exhausted: return "resolution_exhausted";
    case StopReason::barrier_violation: return "barrier_violation";
    case StopReason::ordering_violation: return "ordering_violation";
  }
  return "unknown";
}

inline StopReason stop_reason_from_string(const std::string& s) {
  for (auto r : {StopReason::time_end, StopReason::slope_blowup,
                 StopReason::resolution_exhausted,
                 StopReason::barrier_violation,
                 StopReason::ordering_violation})
    if (s == to_string(r)) return r;
  throw std::invalid_argument("unknown stop reason '" + s + "'");
}

struct Snapshot {
  double time = 0.0;
  std::vector<double> positions;
  std::vector<double> values;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;
  StopReason stop_reason = StopReason::time_end;
  double t_final = 0.0;
  int steps = 0;
  bool barrier_armed = false;  // initial data dominated the barrier at t=0
  ParticleState final_state;
  RunConfig config;
};

// Second-order one-sided slope estimate at the origin from the first two
// interior particles (the origin particle is pinned at 0 with value 0).
inline double slope_at_origin(const ParticleState& s, double x_max) {
  if (s.positions.size() < 3 || !(s.positions[2] < 0.1 * x_max))
    throw std::runtime_error(
        "slope_at_origin: insufficient resolution near the origin");
  const double x1 = s.positions[1], x2 = s.positions[2];
  const double w1 = s.carried_values[1], w2 = s.carried_values[2];
  return (x2 * x2 * w1 - x1 * x1 * w2) / (x1 * x2 * (x2 - x1));
}

// Compression CFL: dt = cfl * min_i dX_i / |u_{i+1} - u_i|. Ordering and
// resolution are governed by how fast a cell shrinks, i.e. by the velocity
// difference across it; a cell translating rigidly needs no restriction.
inline double adaptive_dt(const ParticleState& s,
                          const std::vector<double>& velocities, double cfl,
                          double dt_max) {
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < s.positions.size(); ++i) {
    const double dx = s.positions[i + 1] - s.positions[i];
    const double du = std::abs(velocities[i + 1] - velocities[i]);
    if (du > 0.0) dt = std::min(dt, dx / du);
  }
  dt *= cfl;
  if (dt_max > 0.0) dt = std::min(dt, dt_max);
  return dt;
}

namespace detail {

inline std::vector<double> stage_positions(const std::vector<double>& X,
                                           const std::vector<double>& k,
                                           double h) {
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = X[i] + h * k[i];
  return out;
}

inline void sweep_at(const std::vector<double>& positions,
                     const std::vector<double>& values, const TailModel& tail,
                     double gamma, const QuadratureSpec& spec,
                     const RegKernel* reg, std::vector<double>& out) {
  for (std::size_t i = 0; i + 1 < positions.size(); ++i)
    if (!(positions[i] < positions[i + 1]))
      throw OrderingError("stage positions crossed at index " +
                          std::to_string(i));
  MonotoneCubic interp(positions, values);
  velocity_sweep(interp, tail, gamma, spec, reg, out);
}

}  // namespace detail

// One classical RK4 step of dX/dt = u[omega](X); omega is induced by the
// stage positions with the immutable carried values. k1 may be supplied when
// the caller already swept the velocity at the current state.
inline ParticleState advect_step(const ParticleState& state, double dt,
                                 double gamma, const QuadratureSpec& spec,
                                 const RegKernel* reg = nullptr,
                                 const std::vector<double>* k1_opt = nullptr) {
  if (!(dt > 0.0)) throw std::invalid_argument("advect_step: dt must be > 0");
  state.check_ordering();
  const auto& X = state.positions;
  const auto& W = state.carried_values;
  std::vector<double> k1, k2, k3, k4;
  if (k1_opt) {
    k1 = *k1_opt;
  } else {
    detail::sweep_at(X, W, state.tail, gamma, spec, reg, k1);
  }
  detail::sweep_at(detail::stage_positions(X, k1, 0.5 * dt), W, state.tail,
                   gamma, spec, reg, k2);
  detail::sweep_at(detail::stage_positions(X, k2, 0.5 * dt), W, state.tail,
                   gamma, spec, reg, k3);
  detail::sweep_at(detail::stage_positions(X, k3, dt), W, state.tail, gamma,
                   spec, reg, k4);
  ParticleState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < X.size(); ++i)
    next.positions[i] =
        X[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  next.check_ordering();
  return next;
}

// Forward-Euler step; kept for the time-order study of the RK4 path.
inline ParticleState advect_step_euler(const ParticleState& state, double dt,
                                       double gamma,
                                       const QuadratureSpec& spec,
                                       const RegKernel* reg = nullptr) {
  state.check_ordering();
  std::vector<double> k1;
  detail::sweep_at(state.positions, state.carried_values, state.tail, gamma,
                   spec, reg, k1);
  ParticleState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < state.positions.size(); ++i)
    next.positions[i] = state.positions[i] + dt * k1[i];
  next.check_ordering();
  return next;
}

inline constexpr double kDtMin = 1e-10;
// Resolution guard: stop once the most compressed cell has shrunk by 1e8
// relative to the initial grid (position differences are then at the edge of
// what double spacing resolves against the stop thresholds).
inline constexpr double kMinSpacingCompression = 1e-8;

// Integrates the transport equation until t_end, slope blowup, exhausted
// resolution, or barrier violation (the latter only when the initial data
// dominated the barrier).
inline RunResult run(const RunConfig& cfg_in,
                     const QuadratureSpec& spec = {}) {
  RunConfig cfg = cfg_in;
  if (!cfg.resolved) cfg.resolve(spec);
  const double gamma = cfg.params.gamma;
  OddProfile omega0 = cfg.build_initial_profile();
  ParticleState state = ParticleState::from_profile(omega0);

  std::optional<RegKernel> reg;
  if (cfg.reg_epsilon > 0.0) reg.emplace(cfg.reg_epsilon, gamma);
  const RegKernel* regp = reg ? &*reg : nullptr;

  RunResult res;
  res.config = cfg;

  auto margin_at = [&](const ParticleState& s) {
    const double a = cfg.barrier.scale(std::min(s.time,
                                                cfg.barrier.t_singular()));
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < s.positions.size(); ++i)
      m = std::min(m, s.carried_values[i] -
                          phi_value(a, cfg.barrier.p, s.positions[i]));
    return m;
  };
  res.barrier_armed = margin_at(state) > 0.0;
  const double initial_min_spacing = state.min_spacing();

  std::vector<double> k1;
  int since_snapshot = 0;
  auto take_snapshot = [&](const ParticleState& s) {
    res.snapshots.push_back({s.time, s.positions, s.carried_values});
    since_snapshot = 0;
  };
  take_snapshot(state);

  bool stopped = false;
  while (!stopped) {
    OddProfile profile = state.to_profile();
    detail::sweep_at(state.positions, state.carried_values, state.tail, gamma,
                     spec, regp, k1);

    DiagnosticsRecord rec;
    rec.time = state.time;
    rec.slope_origin = slope_at_origin(state, cfg.x_max);
    rec.norm_p = weighted_norm(profile, cfg.params.p);
    rec.norm_x_pm1 =
        weighted_norm(derivative_profile(profile), cfg.params.p - 1.0);
    rec.barrier_margin = margin_at(state);
    rec.velocity_min = *std::min_element(k1.begin(), k1.end());
    rec.u_x_origin = velocity_gradient_at_origin(profile, gamma, spec);

    double dt = adaptive_dt(state, k1, cfg.cfl, cfg.dt_max);
    const double remaining = cfg.t_end - state.time;

    if (rec.slope_origin > cfg.stop_slope) {
      res.stop_reason = StopReason::slope_blowup;
      stopped = true;
    } else if (remaining <= 1e-14 * cfg.t_end) {
      res.stop_reason = StopReason::time_end;
      stopped = true;
    } else if (res.barrier_armed && !(rec.barrier_margin > 0.0)) {
      res.stop_reason = StopReason::barrier_violation;
      stopped = true;
    } else if (dt < kDtMin ||
               state.min_spacing() <
                   kMinSpacingCompression * initial_min_spacing) {
      res.stop_reason = StopReason::resolution_exhausted;
      stopped = true;
    }

    if (stopped) {
      rec.dt = 0.0;
      res.diagnostics.push_back(rec);
      break;
    }

    dt = std::min(dt, remaining);
    rec.dt = dt;
    res.diagnostics.push_back(rec);

    try {
      state = advect_step(state, dt, gamma, spec, regp, &k1);
    } catch (const OrderingError&) {
      res.stop_reason = StopReason::ordering_violation;
      break;
    }
    ++res.steps;
    if (++since_snapshot >= cfg.snapshot_stride) take_snapshot(state);
  }

  if (res.snapshots.back().time != state.time) take_snapshot(state);
  res.t_final = state.time;
  res.final_state = std::move(state);
  return res;
}

}  // namespace alphapatch
