#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphapatch/barrier.hpp"
#include "alphapatch/initial_data.hpp"
#include "alphapatch/params.hpp"

namespace alphapatch {

// Run configuration; JSON field names match the struct fields exactly and
// unknown keys are an error. Zeros in margin_epsilon / c0 / t_end mean
// "derive the default" (resolve() fills them in).
struct RunConfig {
  ModelParams params;
  Barrier barrier;
  std::string initial_data_kind = "barrier_multiple";
  double initial_data_amplitude = 0.0;  // 0 = auto-scale (smooth_rational)
  std::size_t n_particles = 1024;
  double x_max = 50.0;
  double grading_power = 3.0;
  double cfl = 0.4;
  double t_end = 0.0;
  double stop_slope = 1e4;
  int snapshot_stride = 1;
  double reg_epsilon = 0.0;  // 0 = exact kernel
  double dt_max = 0.0;       // 0 = uncapped
  std::string output_dir = "out";

  double c_estimate = 0.0;  // filled by resolve() when c0 is derived
  bool resolved = false;

  void validate() const {
    params.validate();
    if (barrier.p != params.p)
      throw ConfigError("RunConfig: barrier.p must equal params.p");
    if (!(barrier.a0 > 0.0 && barrier.a0 < 1.0))
      throw ConfigError("RunConfig: barrier.a0 must lie in (0,1)");
    if (n_particles < 64)
      throw ConfigError("RunConfig: n_particles must be >= 64");
    if (!(x_max >= 10.0 * barrier.a0))
      throw ConfigError("RunConfig: x_max must be >= 10*a0");
    if (!(cfl > 0.0 && cfl < 1.0))
      throw ConfigError("RunConfig: cfl must lie in (0,1)");
    if (!(grading_power >= 1.0))
      throw ConfigError("RunConfig: grading_power must be >= 1");
    if (snapshot_stride < 1)
      throw ConfigError("RunConfig: snapshot_stride must be >= 1");
    if (reg_epsilon < 0.0)
      throw ConfigError("RunConfig: reg_epsilon must be >= 0");
    const double bound = margin_epsilon_min(barrier.a0, barrier.p);
    if (params.margin_epsilon != 0.0 && !(params.margin_epsilon > bound))
      throw ConfigError(
          "RunConfig: margin_epsilon must exceed (1-a0^p)^{-1} - 1 = " +
          std::to_string(bound));
  }

  // Fills derived defaults: margin_epsilon = 1.05x its lower bound, c0 =
  // c_estimate/2 from the ratio scan, t_end = T(a0). Quadrature work happens
  // here, not at parse time.
  void resolve(const QuadratureSpec& spec = {}) {
    if (params.margin_epsilon == 0.0)
      params.margin_epsilon =
          1.05 * margin_epsilon_min(barrier.a0, barrier.p);
    if (barrier.c0 == 0.0) {
      params.validate_barrier_mode();
      const RatioScan scan =
          compute_ratio_infimum(params.gamma, params.p, {}, spec);
      c_estimate = scan.c_estimate;
      barrier.c0 = 0.5 * scan.c_estimate;
    }
    if (t_end == 0.0) t_end = barrier.t_singular();
    validate();
    barrier.validate();
    resolved = true;
  }

  OddProfile build_initial_profile() const {
    return build_initial_data(initial_data_kind_from_name(initial_data_kind),
                              params, barrier, n_particles, x_max,
                              grading_power, initial_data_amplitude);
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& allowed,
                                const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key '" + scope + it.key() + "'");
}

inline double num(const nlohmann::json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number())
    throw ConfigError(std::string("config key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  detail::reject_unknown_keys(
      j,
      {"params", "barrier", "initial_data", "n_particles", "x_max",
       "grading_power", "cfl", "t_end", "stop_slope", "snapshot_stride",
       "reg_epsilon", "dt_max", "output_dir"},
      "");
  if (j.contains("params")) {
    const auto& p = j.at("params");
    detail::reject_unknown_keys(p, {"alpha", "p", "q", "margin_epsilon"},
                                "params.");
    cfg.params.alpha = detail::num(p, "alpha", cfg.params.alpha);
    cfg.params.gamma = 1.0 - cfg.params.alpha;
    cfg.params.p = detail::num(p, "p", 0.5 * cfg.params.gamma);
    cfg.params.q = detail::num(p, "q", cfg.params.p);
    cfg.params.margin_epsilon = detail::num(p, "margin_epsilon", 0.0);
  } else {
    cfg.params.gamma = 1.0 - cfg.params.alpha;
    cfg.params.p = 0.5 * cfg.params.gamma;
    cfg.params.q = cfg.params.p;
    cfg.params.margin_epsilon = 0.0;
  }
  cfg.barrier.p = cfg.params.p;
  if (j.contains("barrier")) {
    const auto& b = j.at("barrier");
    detail::reject_unknown_keys(b, {"a0", "c0", "p"}, "barrier.");
    cfg.barrier.a0 = detail::num(b, "a0", cfg.barrier.a0);
    cfg.barrier.c0 = detail::num(b, "c0", 0.0);
    cfg.barrier.p = detail::num(b, "p", cfg.params.p);
  }
  if (j.contains("initial_data")) {
    const auto& d = j.at("initial_data");
    detail::reject_unknown_keys(d, {"kind", "amplitude"}, "initial_data.");
    if (d.contains("kind")) {
      if (!d.at("kind").is_string())
        throw ConfigError("initial_data.kind must be a string");
      cfg.initial_data_kind = d.at("kind").get<std::string>();
      initial_data_kind_from_name(cfg.initial_data_kind);
    }
    cfg.initial_data_amplitude = detail::num(d, "amplitude", 0.0);
  }
  cfg.n_particles = static_cast<std::size_t>(
      detail::num(j, "n_particles", double(cfg.n_particles)));
  cfg.x_max = detail::num(j, "x_max", cfg.x_max);
  cfg.grading_power = detail::num(j, "grading_power", cfg.grading_power);
  cfg.cfl = detail::num(j, "cfl", cfg.cfl);
  cfg.t_end = detail::num(j, "t_end", 0.0);
  cfg.stop_slope = detail::num(j, "stop_slope", cfg.stop_slope);
  cfg.snapshot_stride =
      static_cast<int>(detail::num(j, "snapshot_stride", 1.0));
  cfg.reg_epsilon = detail::num(j, "reg_epsilon", 0.0);
  cfg.dt_max = detail::num(j, "dt_max", 0.0);
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw ConfigError("output_dir must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return parse_run_config(j);
}

// Applies one dotted-key override, e.g. "barrier.a0=0.4" or "cfl=0.2".
inline void apply_override(nlohmann::json& j, const std::string& expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + expr + "' is not of the form key=value");
  std::string key = expr.substr(0, eq);
  const std::string value = expr.substr(eq + 1);
  nlohmann::json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part =
        key.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) throw ConfigError("override '" + expr + "': empty key");
    if (dot == std::string::npos) {
      nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["params"] = {{"alpha", cfg.params.alpha},
                 {"p", cfg.params.p},
                 {"q", cfg.params.q},
                 {"margin_epsilon", cfg.params.margin_epsilon}};
  j["barrier"] = {
      {"a0", cfg.barrier.a0}, {"c0", cfg.barrier.c0}, {"p", cfg.barrier.p}};
  j["initial_data"] = {{"kind", cfg.initial_data_kind},
                       {"amplitude", cfg.initial_data_amplitude}};
  j["n_particles"] = cfg.n_particles;
  j["x_max"] = cfg.x_max;
  j["grading_power"] = cfg.grading_power;
  j["cfl"] = cfg.cfl;
  j["t_end"] = cfg.t_end;
  j["stop_slope"] = cfg.stop_slope;
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["reg_epsilon"] = cfg.reg_epsilon;
  j["dt_max"] = cfg.dt_max;
  j["output_dir"] = cfg.output_dir;
  return j;
}

}  // namespace alphapatch
