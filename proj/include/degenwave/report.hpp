#pragma once

// Result persistence: JSON for structured results, CSV for series, SVG for
// static profile figures, plus the run manifest. Output formatting is fixed
// (%.17g, ordered keys, sequential evaluation) so identical inputs reproduce
// identical bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "degenwave/bounds.hpp"
#include "degenwave/error.hpp"
#include "degenwave/model.hpp"
#include "degenwave/pdesim.hpp"
#include "degenwave/profile.hpp"
#include "degenwave/shooting.hpp"

namespace degenwave {

inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string model_hash(const ModelSpec& m) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(model_to_json(m).dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? ',' : '\n';
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += format_double(row[i]);
      out += (i + 1 < row.size()) ? ',' : '\n';
    }
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Errc::invalid_config, "cannot open " + path.string() + " for writing");
  f << content;
}

// ---------------------------------------------------------------------------
// JSON views of the result types
// ---------------------------------------------------------------------------

inline ordered_json to_json(const SpeedBounds& b) {
  return ordered_json{{"c_sharp_branch1", b.c_sharp_branch1},
                      {"c_sharp_branch2", b.c_sharp_branch2},
                      {"c_sharp", b.c_sharp},
                      {"c_star", b.c_star},
                      {"branch1_error", b.branch1_error},
                      {"branch2_error", b.branch2_error}};
}

inline ordered_json to_json(const AssumptionReport& rep) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(ordered_json{{"name", c.name},
                                  {"pass", c.pass},
                                  {"worst_violation", c.worst_violation},
                                  {"at", {c.at_s, c.at_r}}});
  }
  return ordered_json{{"pass", rep.pass}, {"grid_n", rep.grid_n}, {"checks", checks}};
}

inline ordered_json shot_summary_json(const ShotResult& s) {
  return ordered_json{{"c", s.c},
                      {"eps", s.eps},
                      {"delta", s.delta},
                      {"eta_end", s.eta_end},
                      {"B_end", s.B_end},
                      {"a_thr", s.a_thr},
                      {"sharp_amplitude", s.sharp_amplitude},
                      {"admissibility", admissibility_name(s.admissibility)},
                      {"admissible", s.admissible},
                      {"regime", regime_name(s.regime)},
                      {"tail_p", s.tail_p},
                      {"tail_A", s.tail_A},
                      {"tail_fit_ok", s.tail_fit_ok},
                      {"diagonal_breach", s.diagonal_breach},
                      {"floor_hit", s.floor_hit},
                      {"steps", s.steps}};
}

inline ordered_json shot_full_json(const ShotResult& s) {
  auto j = shot_summary_json(s);
  j["launch_coeff"] = s.launch_coeff;
  j["eta"] = s.eta;
  j["B"] = s.B;
  return j;
}

inline ShotResult shot_from_json(const nlohmann::json& j) {
  ShotResult s;
  s.c = j.at("c");
  s.eps = j.at("eps");
  s.delta = j.at("delta");
  s.eta_end = j.at("eta_end");
  s.B_end = j.at("B_end");
  s.a_thr = j.at("a_thr");
  s.sharp_amplitude = j.at("sharp_amplitude");
  s.admissible = j.at("admissible");
  s.tail_p = j.at("tail_p");
  s.tail_A = j.at("tail_A");
  s.tail_fit_ok = j.at("tail_fit_ok");
  s.diagonal_breach = j.at("diagonal_breach");
  s.floor_hit = j.at("floor_hit");
  s.steps = j.at("steps");
  s.launch_coeff = j.value("launch_coeff", 0.0);
  s.eta = j.at("eta").get<std::vector<double>>();
  s.B = j.at("B").get<std::vector<double>>();
  const std::string adm = j.at("admissibility");
  s.admissibility = adm == "admissible"     ? Admissibility::admissible
                    : adm == "inconclusive" ? Admissibility::inconclusive
                                            : Admissibility::not_admissible;
  const std::string reg = j.at("regime");
  s.regime = reg == "classical"         ? Regime::classical
             : reg == "sharp_candidate" ? Regime::sharp_candidate
             : reg == "indeterminate"   ? Regime::indeterminate
                                        : Regime::non_admissible;
  return s;
}

inline ordered_json to_json(const SpeedReport& r) {
  ordered_json shots = ordered_json::array();
  for (const auto& s : r.shots) shots.push_back(shot_summary_json(s));
  return ordered_json{{"model", r.model_name},
                      {"c_lo", r.c_lo},
                      {"c_hi", r.c_hi},
                      {"c0", r.c0},
                      {"bracket_width", r.bracket_width},
                      {"c_sharp", r.c_sharp},
                      {"c_star", r.c_star},
                      {"eps", r.eps},
                      {"delta_initial", r.delta_initial},
                      {"delta_final", r.delta_final},
                      {"tol_c", r.tol_c},
                      {"delta_refinements", r.delta_refinements},
                      {"shots", shots}};
}

inline ordered_json profile_summary_json(const WaveProfile& p) {
  return ordered_json{{"c", p.c},
                      {"eta0", p.eta0},
                      {"samples", p.xi.size()},
                      {"xi_min", p.xi.empty() ? 0.0 : p.xi.front()},
                      {"xi_max", p.xi.empty() ? 0.0 : p.xi.back()},
                      {"tau_is_finite", p.tau_is_finite},
                      {"tau", p.tau_is_finite ? ordered_json(p.tau) : ordered_json("inf")},
                      {"sigma_equals_tau", p.sigma_equals_tau},
                      {"residual_sup", p.residual_sup},
                      {"residual_l2", p.residual_l2}};
}

inline ordered_json to_json(const FrontEdge& e) {
  return ordered_json{
      {"kind", front_edge_name(e.kind)},
      {"tau_offset",
       e.kind == FrontEdgeKind::finite ? ordered_json(e.tau_offset) : ordered_json("inf")},
      {"increments", e.increments}};
}

inline ordered_json pde_summary_json(const PdeRun& r) {
  return ordered_json{{"cells", r.cells},
                      {"dx", r.dx},
                      {"dt", r.dt},
                      {"steps", r.steps},
                      {"t_end", r.t_end},
                      {"front_formed", r.front_formed},
                      {"front_reached_boundary", r.front_reached_boundary},
                      {"front_samples", r.time.size()},
                      {"clip_count", r.clip_count},
                      {"clipped_mass", r.clipped_mass},
                      {"mass_drift_step_max", r.mass_drift_step_max},
                      {"mass_drift_per_time", r.mass_drift_per_time}};
}

inline std::string profile_csv(const WaveProfile& p) {
  std::vector<std::vector<double>> rows;
  rows.reserve(p.xi.size());
  for (std::size_t i = 0; i < p.xi.size(); ++i)
    rows.push_back({p.xi[i], p.eta[i], p.beta[i], p.dbeta[i], p.residual[i]});
  return csv_table({"xi", "eta", "beta", "dbeta", "residual"}, rows);
}

inline std::string trajectory_csv(const ShotResult& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(s.eta.size());
  for (std::size_t i = 0; i < s.eta.size(); ++i) rows.push_back({s.eta[i], s.B[i]});
  return csv_table({"eta", "B"}, rows);
}

inline std::string front_series_csv(const PdeRun& r) {
  std::vector<std::vector<double>> rows;
  rows.reserve(r.time.size());
  for (std::size_t i = 0; i < r.time.size(); ++i) rows.push_back({r.time[i], r.front[i]});
  return csv_table({"t", "x_front"}, rows);
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::string model_hash_hex;
  ordered_json parameters;  // every tolerance and seed that shaped the run
  std::string tool_version = kToolVersion;
  std::string timestamp;  // informational; result files carry no timestamps
  std::vector<std::string> outputs;
};

inline ordered_json to_json(const RunManifest& m) {
  return ordered_json{{"command", m.command},       {"model_hash", m.model_hash_hex},
                      {"parameters", m.parameters}, {"tool_version", m.tool_version},
                      {"timestamp", m.timestamp},   {"outputs", m.outputs}};
}

// ---------------------------------------------------------------------------
// SVG profile figure: two panels, the rising component on the left and the
// falling one on the right.
// ---------------------------------------------------------------------------

namespace detail {

inline void svg_polyline(std::string& out, const std::vector<double>& xs,
                         const std::vector<double>& ys, double x0, double y0, double w, double h,
                         double xmin, double xmax, double ymin, double ymax) {
  out += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"";
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 600);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double px = x0 + (xs[i] - xmin) / (xmax - xmin) * w;
    const double py = y0 + h - (ys[i] - ymin) / (ymax - ymin) * h;
    out += format_double(px) + "," + format_double(py) + " ";
  }
  out += "\"/>\n";
}

inline void svg_panel(std::string& out, const char* title, const std::vector<double>& xs,
                      const std::vector<double>& ys, double x0) {
  const double w = 320, h = 200, y0 = 30;
  double xmin = xs.front(), xmax = xs.back();
  if (xmax <= xmin) xmax = xmin + 1;
  out += "<rect x=\"" + format_double(x0) + "\" y=\"" + format_double(y0) + "\" width=\"" +
         format_double(w) + "\" height=\"" + format_double(h) +
         "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"" + format_double(x0 + w / 2) + "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" +
         title + "</text>\n";
  // unit gridline at y = 1
  const double ymin = -0.05, ymax = 1.1;
  const double py1 = y0 + h - (1.0 - ymin) / (ymax - ymin) * h;
  out += "<line x1=\"" + format_double(x0) + "\" y1=\"" + format_double(py1) + "\" x2=\"" +
         format_double(x0 + w) + "\" y2=\"" + format_double(py1) +
         "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";
  svg_polyline(out, xs, ys, x0, y0, w, h, xmin, xmax, ymin, ymax);
}

}  // namespace detail

inline std::string profile_svg(const WaveProfile& p) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"260\" "
         "viewBox=\"0 0 720 260\">\n";
  detail::svg_panel(out, "eta (rising)", p.xi, p.eta, 30);
  detail::svg_panel(out, "beta (falling)", p.xi, p.beta, 380);
  out += "</svg>\n";
  return out;
}

}  // namespace degenwave
