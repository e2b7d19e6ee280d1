#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphapatch/config.hpp"
#include "alphapatch/solver.hpp"

namespace alphapatch {

inline constexpr const char* kVersionStamp = "alphapatch 0.1.0";

namespace detail {

// Shortest round-trip decimal form; byte-stable across runs and thread counts.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace detail

// snapshots.csv: one row per particle per snapshot, barrier overlay included.
inline void write_snapshots_csv(const std::string& path,
                                const std::vector<Snapshot>& snaps,
                                const Barrier& barrier) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,x,omega,phi,omega_minus_phi\n";
  const double T = barrier.t_singular();
  for (const auto& s : snaps) {
    const double a = barrier.scale(std::min(s.time, T));
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      const double phi = phi_value(a, barrier.p, s.positions[i]);
      out << detail::fmt(s.time) << ',' << detail::fmt(s.positions[i]) << ','
          << detail::fmt(s.values[i]) << ',' << detail::fmt(phi) << ','
          << detail::fmt(s.values[i] - phi) << '\n';
    }
  }
}

// diagnostics.csv: frozen 7-column schema; the per-step velocity gradient at
// the origin goes to its own artifact (origin_ode.csv).
inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<DiagnosticsRecord>& recs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time,slope_origin,norm_p,norm_x_pm1,barrier_margin,dt,velocity_min\n";
  for (const auto& r : recs)
    out << detail::fmt(r.time) << ',' << detail::fmt(r.slope_origin) << ','
        << detail::fmt(r.norm_p) << ',' << detail::fmt(r.norm_x_pm1) << ','
        << detail::fmt(r.barrier_margin) << ',' << detail::fmt(r.dt) << ','
        << detail::fmt(r.velocity_min) << '\n';
}

inline void write_origin_ode_csv(const std::string& path,
                                 const std::vector<DiagnosticsRecord>& recs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time,u_x_origin\n";
  for (const auto& r : recs)
    out << detail::fmt(r.time) << ',' << detail::fmt(r.u_x_origin) << '\n';
}

inline nlohmann::json summary_json(const RunResult& res) {
  const auto& cfg = res.config;
  nlohmann::json j;
  j["version"] = kVersionStamp;
  j["stop_reason"] = to_string(res.stop_reason);
  j["t_final"] = res.t_final;
  j["steps"] = res.steps;
  j["barrier_armed"] = res.barrier_armed;
  j["t_singular"] = cfg.barrier.t_singular();
  if (res.stop_reason == StopReason::slope_blowup ||
      res.stop_reason == StopReason::resolution_exhausted)
    j["detected_blowup_time"] = res.t_final;
  else
    j["detected_blowup_time"] = nullptr;
  j["c_estimate"] = cfg.c_estimate;
  j["final_slope_origin"] = res.diagnostics.empty()
                                ? 0.0
                                : res.diagnostics.back().slope_origin;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : res.diagnostics)
    min_margin = std::min(min_margin, r.barrier_margin);
  j["min_barrier_margin"] = min_margin;
  j["tail"] = {{"exponent", res.final_state.tail.exponent},
               {"coefficient", res.final_state.tail.coefficient}};
  j["config"] = run_config_to_json(cfg);
  return j;
}

// ---- simple static SVG plots ----------------------------------------------

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label,
          bool log_x = false, bool log_y = false)
      : title_(std::move(title)),
        x_label_(std::move(x_label)),
        y_label_(std::move(y_label)),
        log_x_(log_x),
        log_y_(log_y) {}

  void add_series(std::string name, std::string color,
                  std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({std::move(name), std::move(color), std::move(xs),
                       std::move(ys)});
  }

  void write(const std::string& path) const {
    const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto tx = [&](double x) { return log_x_ ? std::log10(x) : x; };
    auto ty = [&](double y) { return log_y_ ? std::log10(y) : y; };
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (log_x_ && !(s.xs[i] > 0.0)) continue;
        if (log_y_ && !(s.ys[i] > 0.0)) continue;
        x0 = std::min(x0, tx(s.xs[i]));
        x1 = std::max(x1, tx(s.xs[i]));
        y0 = std::min(y0, ty(s.ys[i]));
        y1 = std::max(y1, ty(s.ys[i]));
      }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    auto px = [&](double x) {
      return ml + (W - ml - mr) * (tx(x) - x0) / (x1 - x0);
    };
    auto py = [&](double y) {
      return H - mb - (H - mt - mb) * (ty(y) - y0) / (y1 - y0);
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
        << "' height='" << H << "' viewBox='0 0 " << W << ' ' << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' "
        << "font-family='sans-serif' font-size='15'>" << title_
        << "</text>\n";
    // axes
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
        << "' y2='" << H - mb << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << H - mb << "' stroke='black'/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = x0 + (x1 - x0) * k / 4.0;
      const double fy = y0 + (y1 - y0) * k / 4.0;
      const double sx = ml + (W - ml - mr) * k / 4.0;
      const double sy = H - mb - (H - mt - mb) * k / 4.0;
      char lbl[32];
      std::snprintf(lbl, sizeof(lbl), log_x_ ? "1e%.2g" : "%.3g", fx);
      out << "<text x='" << sx << "' y='" << H - mb + 18
          << "' text-anchor='middle' font-family='sans-serif' "
             "font-size='11'>"
          << lbl << "</text>\n";
      std::snprintf(lbl, sizeof(lbl), log_y_ ? "1e%.2g" : "%.3g", fy);
      out << "<text x='" << ml - 8 << "' y='" << sy + 4
          << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
          << lbl << "</text>\n";
    }
    out << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
        << x_label_ << "</text>\n";
    out << "<text x='16' y='" << (mt + H - mb) / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
        << "transform='rotate(-90 16 " << (mt + H - mb) / 2 << ")'>"
        << y_label_ << "</text>\n";
    int li = 0;
    for (const auto& s : series_) {
      out << "<polyline fill='none' stroke='" << s.color
          << "' stroke-width='1.5' points='";
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (log_x_ && !(s.xs[i] > 0.0)) continue;
        if (log_y_ && !(s.ys[i] > 0.0)) continue;
        out << px(s.xs[i]) << ',' << py(s.ys[i]) << ' ';
      }
      out << "'/>\n";
      out << "<text x='" << W - mr - 8 << "' y='" << mt + 16 + 16 * li
          << "' text-anchor='end' font-family='sans-serif' font-size='12' "
          << "fill='" << s.color << "'>" << s.name << "</text>\n";
      ++li;
    }
    out << "</svg>\n";
  }

 private:
  struct Series {
    std::string name, color;
    std::vector<double> xs, ys;
  };
  std::string title_, x_label_, y_label_;
  bool log_x_, log_y_;
  std::vector<Series> series_;
};

// Overlay of omega and phi for a few selected snapshots, on log-x to expose
// the cusp region.
inline void write_profile_svgs(const std::string& dir,
                               const std::vector<Snapshot>& snaps,
                               const Barrier& barrier) {
  if (snaps.empty()) return;
  std::vector<std::size_t> picks;
  const std::size_t n = snaps.size();
  for (int k = 0; k < 5; ++k)
    picks.push_back(std::min(n - 1, (n - 1) * k / 4));
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  for (std::size_t idx : picks) {
    const auto& s = snaps[idx];
    char name[64];
    std::snprintf(name, sizeof(name), "profiles_t%.6g.svg", s.time);
    SvgPlot plot("omega vs phi at t = " + std::string(detail::fmt(s.time)),
                 "x (log)", "value", /*log_x=*/true);
    const double a =
        barrier.scale(std::min(s.time, barrier.t_singular()));
    std::vector<double> phis(s.positions.size());
    for (std::size_t i = 0; i < s.positions.size(); ++i)
      phis[i] = phi_value(a, barrier.p, s.positions[i]);
    plot.add_series("omega", "#1f77b4", s.positions, s.values);
    plot.add_series("phi", "#d62728", s.positions, phis);
    plot.write((std::filesystem::path(dir) / name).string());
  }
}

inline void write_diagnostics_svg(const std::string& path,
                                  const std::vector<DiagnosticsRecord>& recs) {
  if (recs.empty()) return;
  std::vector<double> ts, slopes, margins;
  for (const auto& r : recs) {
    ts.push_back(r.time);
    slopes.push_back(r.slope_origin);
    margins.push_back(r.barrier_margin);
  }
  SvgPlot plot("diagnostics", "t", "slope_origin (log) / barrier margin",
               false, true);
  plot.add_series("slope_origin", "#1f77b4", ts, slopes);
  plot.add_series("barrier_margin", "#2ca02c", ts, margins);
  plot.write(path);
}

// ---- run directory ---------------------------------------------------------

inline void write_run_directory(const std::string& dir, const RunResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_snapshots_csv((fs::path(dir) / "snapshots.csv").string(),
                      res.snapshots, res.config.barrier);
  write_diagnostics_csv((fs::path(dir) / "diagnostics.csv").string(),
                        res.diagnostics);
  write_origin_ode_csv((fs::path(dir) / "origin_ode.csv").string(),
                       res.diagnostics);
  {
    std::ofstream out((fs::path(dir) / "summary.json").string());
    out << summary_json(res).dump(2) << '\n';
  }
  {
    std::ofstream out((fs::path(dir) / "config.json").string());
    out << run_config_to_json(res.config).dump(2) << '\n';
  }
  write_profile_svgs(dir, res.snapshots, res.config.barrier);
  write_diagnostics_svg((fs::path(dir) / "diagnostics.svg").string(),
                        res.diagnostics);
}

// Logged artifacts of a finished run, as reloaded from disk; the post-hoc
// checks consume only this view.
struct RunArtifacts {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;  // u_x_origin merged in
  RunConfig config;
  StopReason stop_reason = StopReason::time_end;
  double t_final = 0.0;
  bool barrier_armed = false;

  static RunArtifacts from_result(const RunResult& res) {
    RunArtifacts a;
    a.snapshots = res.snapshots;
    a.diagnostics = res.diagnostics;
    a.config = res.config;
    a.stop_reason = res.stop_reason;
    a.t_final = res.t_final;
    a.barrier_armed = res.barrier_armed;
    return a;
  }
};

inline RunArtifacts load_run_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  RunArtifacts art;
  {
    std::ifstream in((fs::path(dir) / "summary.json").string());
    if (!in)
      throw std::runtime_error("run directory missing summary.json: " + dir);
    nlohmann::json j;
    in >> j;
    art.config = parse_run_config(j.at("config"));
    art.config.c_estimate = j.value("c_estimate", 0.0);
    art.config.resolved = true;
    art.stop_reason = stop_reason_from_string(j.at("stop_reason"));
    art.t_final = j.at("t_final").get<double>();
    art.barrier_armed = j.at("barrier_armed").get<bool>();
  }
  {
    std::ifstream in((fs::path(dir) / "snapshots.csv").string());
    if (!in)
      throw std::runtime_error("run directory missing snapshots.csv: " + dir);
    std::string line;
    std::getline(in, line);  // header
    Snapshot cur;
    bool have = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cells = detail::split_csv_line(line);
      if (cells.size() != 5)
        throw std::runtime_error("snapshots.csv: malformed row '" + line + "'");
      const double t = std::stod(cells[0]);
      if (!have || t != cur.time) {
        if (have) art.snapshots.push_back(cur);
        cur = Snapshot{t, {}, {}};
        have = true;
      }
      cur.positions.push_back(std::stod(cells[1]));
      cur.values.push_back(std::stod(cells[2]));
    }
    if (have) art.snapshots.push_back(cur);
  }
  {
    std::ifstream in((fs::path(dir) / "diagnostics.csv").string());
    if (!in)
      throw std::runtime_error("run directory missing diagnostics.csv: " +
                               dir);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cells = detail::split_csv_line(line);
      if (cells.size() != 7)
        throw std::runtime_error("diagnostics.csv: malformed row '" + line +
                                 "'");
      DiagnosticsRecord r;
      r.time = std::stod(cells[0]);
      r.slope_origin = std::stod(cells[1]);
      r.norm_p = std::stod(cells[2]);
      r.norm_x_pm1 = std::stod(cells[3]);
      r.barrier_margin = std::stod(cells[4]);
      r.dt = std::stod(cells[5]);
      r.velocity_min = std::stod(cells[6]);
      art.diagnostics.push_back(r);
    }
  }
  {
    std::ifstream in((fs::path(dir) / "origin_ode.csv").string());
    if (in) {
      std::string line;
      std::getline(in, line);
      std::size_t i = 0;
      while (std::getline(in, line) && i < art.diagnostics.size()) {
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() == 2) art.diagnostics[i].u_x_origin = std::stod(cells[1]);
        ++i;
      }
    }
  }
  return art;
}

}  // namespace alphapatch
