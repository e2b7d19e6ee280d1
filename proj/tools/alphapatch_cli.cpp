#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alphapatch/barrier.hpp"
#include "alphapatch/config.hpp"
#include "alphapatch/io.hpp"
#include "alphapatch/picard.hpp"
#include "alphapatch/solver.hpp"
#include "alphapatch/verify.hpp"

namespace {

using namespace alphapatch;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

RunConfig assemble_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed JSON in '" + config_path + "': " +
                        e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  }
  for (const auto& ov : overrides) apply_override(j, ov);
  RunConfig cfg = parse_run_config(j);
  if (cfg.params.margin_epsilon == 0.0)
    cfg.params.margin_epsilon =
        1.05 * margin_epsilon_min(cfg.barrier.a0, cfg.barrier.p);
  return cfg;
}

nlohmann::json scan_to_json(const RatioScan& scan, double gamma, double p) {
  nlohmann::json j;
  j["gamma"] = gamma;
  j["p"] = p;
  j["c_estimate"] = scan.c_estimate;
  j["limit_zero"] = scan.limit_zero;
  j["limit_infinity"] = scan.limit_infinity;
  return j;
}

int cmd_simulate(const RunConfig& cfg_in, const std::string& outdir) {
  RunConfig cfg = cfg_in;
  cfg.output_dir = outdir;
  cfg.resolve();
  RunResult res = run(cfg);
  write_run_directory(outdir, res);
  std::printf("simulate: stop_reason=%s t_final=%.10g steps=%d outdir=%s\n",
              to_string(res.stop_reason), res.t_final, res.steps,
              outdir.c_str());
  return kExitOk;
}

int cmd_compute_constant(const RunConfig& cfg_in, const std::string& outdir) {
  RunConfig cfg = cfg_in;
  cfg.params.validate_barrier_mode();
  const auto scan = compute_ratio_infimum(cfg.params.gamma, cfg.params.p);
  std::printf("c_estimate    = %.10g\n", scan.c_estimate);
  std::printf("R(0+)  limit  = %.10g\n", scan.limit_zero);
  std::printf("R(inf) limit  = %.10g\n", scan.limit_infinity);
  fs::create_directories(outdir);
  std::ofstream out(fs::path(outdir) / "constant.json");
  out << scan_to_json(scan, cfg.params.gamma, cfg.params.p).dump(2) << '\n';
  return scan.c_estimate > 0.0 ? kExitOk : kExitViolation;
}

int cmd_barrier_check(const RunConfig& cfg_in, const std::string& outdir) {
  RunConfig cfg = cfg_in;
  cfg.params.validate_barrier_mode();
  const auto scan = compute_ratio_infimum(cfg.params.gamma, cfg.params.p);
  Barrier barrier = cfg.barrier;
  if (barrier.c0 == 0.0) barrier.c0 = 0.5 * scan.c_estimate;
  const auto rep = check_supersolution(barrier, cfg.params.gamma, scan);
  nlohmann::json j = scan_to_json(scan, cfg.params.gamma, cfg.params.p);
  j["c0"] = barrier.c0;
  j["min_slack"] = rep.min_slack;
  j["t_dependence"] = rep.t_dependence;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : rep.violations)
    j["violations"].push_back(
        {{"t", v.t}, {"z", v.z}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  j["pass"] = rep.pass;
  fs::create_directories(outdir);
  std::ofstream out(fs::path(outdir) / "barrier_check.json");
  out << j.dump(2) << '\n';
  std::printf("barrier-check: %s (c0=%.10g, min_slack=%.10g, violations=%zu)\n",
              rep.pass ? "pass" : "FAIL", barrier.c0, rep.min_slack,
              rep.violations.size());
  return rep.pass ? kExitOk : kExitViolation;
}

int cmd_convergence(const RunConfig& cfg_in, const std::string& outdir) {
  RunConfig cfg = cfg_in;
  const double gamma = cfg.params.gamma, p = cfg.params.p;
  auto omega = sample_phi_profile(cfg.barrier.a0, p, 1.0, 257, 40.0, 3.0);
  auto deriv = sample_phi_derivative(cfg.barrier.a0, p, 1.0, 257, 40.0, 3.0);
  const auto rep = verify_regularization_convergence(
      omega, deriv, {1.0}, {0.2, 0.1, 0.05, 0.025}, gamma, p);
  fs::create_directories(outdir);
  std::ofstream out(fs::path(outdir) / "convergence.json");
  out << rep.to_json().dump(2) << '\n';
  std::printf("convergence: %s (fitted order in [%.4g, %.4g], expected %.4g)\n",
              rep.pass ? "pass" : "FAIL", rep.measured.at("min_fitted_order"),
              rep.measured.at("max_fitted_order"), 1.0 - gamma);
  return rep.pass ? kExitOk : kExitViolation;
}

int cmd_norms(const RunConfig& cfg_in, const std::string& outdir) {
  RunConfig cfg = cfg_in;
  const auto rep =
      verify_velocity_bounds(cfg.params.gamma, cfg.params.q, 257, 40.0);
  fs::create_directories(outdir);
  std::ofstream out(fs::path(outdir) / "norms.json");
  out << rep.to_json().dump(2) << '\n';
  std::printf("norms: %s (max first-line ratio %.6g <= C = %.6g)\n",
              rep.pass ? "pass" : "FAIL", rep.measured.at("max_ratio1"),
              rep.measured.at("C_exact"));
  return rep.pass ? kExitOk : kExitViolation;
}

int cmd_verify(const std::string& rundir) {
  RunArtifacts art = load_run_directory(rundir);
  std::vector<VerificationReport> reports;
  reports.push_back(verify_barrier_dominance(art));
  reports.push_back(verify_origin_slope_ode(art));
  reports.push_back(apriori_monitor(art));
  nlohmann::json j = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& r : reports) {
    j.push_back(r.to_json());
    all_pass = all_pass && r.pass;
    std::printf("%-28s %s", r.check.c_str(), r.pass ? "pass" : "FAIL");
    if (r.first_violation)
      std::printf("  (first violation at t=%.10g, x=%.10g)",
                  r.first_violation->first, r.first_violation->second);
    std::printf("\n");
  }
  std::ofstream out(fs::path(rundir) / "verification_report.json");
  out << j.dump(2) << '\n';
  return all_pass ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alphapatch: numerical laboratory for the 1D alpha-patch "
               "transport model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = "out";
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config)
      sub->add_option("-c,--config", config_path, "run configuration (JSON)");
    sub->add_option("-o,--output", outdir, "output directory");
    sub->add_option("--set", overrides,
                    "dotted-key config override, e.g. --set cfl=0.2");
  };

  auto* sim = app.add_subcommand("simulate", "integrate the transport model");
  add_common(sim);
  auto* bchk = app.add_subcommand(
      "barrier-check", "verify the supersolution inequality for the barrier");
  add_common(bchk);
  auto* cconst = app.add_subcommand(
      "compute-constant", "compute the ratio infimum c and its limits");
  add_common(cconst);
  auto* conv = app.add_subcommand(
      "convergence", "regularized-kernel convergence study");
  add_common(conv);
  auto* norms = app.add_subcommand(
      "norms", "velocity-bound ratios over the test profile family");
  add_common(norms);
  auto* verify = app.add_subcommand(
      "verify", "post-hoc checks on an existing run directory");
  verify->add_option("-o,--output", outdir, "run directory to check")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }

  try {
    if (verify->parsed()) return cmd_verify(outdir);
    RunConfig cfg = assemble_config(config_path, overrides);
    if (sim->parsed()) return cmd_simulate(cfg, outdir);
    if (bchk->parsed()) return cmd_barrier_check(cfg, outdir);
    if (cconst->parsed()) return cmd_compute_constant(cfg, outdir);
    if (conv->parsed()) return cmd_convergence(cfg, outdir);
    if (norms->parsed()) return cmd_norms(cfg, outdir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
