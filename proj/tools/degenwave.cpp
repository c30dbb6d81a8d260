// degenwave: traveling-wavefront analysis for the doubly degenerate
// reaction-diffusion system n_t = -f(n,b), b_t = [g(n)h(b)b_x]_x + f(n,b).
//
// Subcommands: bounds | shoot | speed | profile | pde | sweep | report
// Exit codes: 0 ok, 1 error, 2 inconclusive after refinement.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degenwave/bounds.hpp"
#include "degenwave/error.hpp"
#include "degenwave/model.hpp"
#include "degenwave/pdesim.hpp"
#include "degenwave/profile.hpp"
#include "degenwave/report.hpp"
#include "degenwave/shooting.hpp"

namespace fs = std::filesystem;
using namespace degenwave;

namespace {

struct GlobalOpts {
  std::string model_path;
  std::string out_dir;
  std::string cache_dir;
  double tol = 1e-10;
  double tol_c = 1e-3;
  double eps = 1e-6;
  double delta = 1e-6;
  bool emit_json = true;
  bool emit_csv = false;
};

ModelSpec load_model(const GlobalOpts& g) {
  std::ifstream f(g.model_path);
  if (!f) fail(Errc::invalid_config, "cannot open model config " + g.model_path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_config, std::string("model config is not valid JSON: ") + e.what());
  }
  ModelSpec m = model_from_json(j);
  audit_assumptions(m, 64);
  if (!m.audited) fail(Errc::invalid_config, "model failed the assumption audit");
  return m;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  return buf;
}

// Serialized shots keyed by model hash, speed, offsets and tolerances, so
// bisection re-runs are cheap.
class FileShotCache final : public ShotCache {
 public:
  explicit FileShotCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::optional<ShotResult> load(const ModelSpec& m, double c, double eps, double delta,
                                 const IntegratorConfig& cfg) override {
    std::ifstream f(path_for(m, c, eps, delta, cfg));
    if (!f) return std::nullopt;
    try {
      nlohmann::json j;
      f >> j;
      return shot_from_json(j);
    } catch (...) {
      return std::nullopt;  // unreadable cache entries are recomputed
    }
  }

  void store(const ModelSpec& m, const IntegratorConfig& cfg, const ShotResult& shot) override {
    write_text_file(path_for(m, shot.c, shot.eps, shot.delta, cfg), shot_full_json(shot).dump());
  }

 private:
  fs::path path_for(const ModelSpec& m, double c, double eps, double delta,
                    const IntegratorConfig& cfg) const {
    const std::string key = model_hash(m) + "|" + format_double(c) + "|" + format_double(eps) +
                            "|" + format_double(delta) + "|" + format_double(cfg.rel_tol) + "|" +
                            format_double(cfg.abs_tol);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
    return dir_ / (std::string("shot_") + buf + ".json");
  }

  fs::path dir_;
};

void write_manifest(const GlobalOpts& g, const std::string& command, const ModelSpec& m,
                    ordered_json params, const std::vector<std::string>& outputs) {
  if (g.out_dir.empty()) return;
  RunManifest man;
  man.command = command;
  man.model_hash_hex = model_hash(m);
  man.parameters = std::move(params);
  man.timestamp = iso_timestamp();
  man.outputs = outputs;
  write_text_file(fs::path(g.out_dir) / (command + "_manifest.json"), to_json(man).dump(2) + "\n");
}

void emit(const GlobalOpts& g, const std::string& name, const std::string& content,
          std::vector<std::string>& outputs) {
  if (g.out_dir.empty()) return;
  fs::create_directories(g.out_dir);
  const auto path = fs::path(g.out_dir) / name;
  write_text_file(path, content);
  outputs.push_back(path.string());
}

int cmd_bounds(const GlobalOpts& g) {
  ModelSpec m = load_model(g);
  const auto b = compute_bounds(m, g.tol);
  const auto j = to_json(b);
  std::cout << j.dump(2) << "\n";
  std::vector<std::string> outputs;
  emit(g, "bounds.json", j.dump(2) + "\n", outputs);
  write_manifest(g, "bounds", m, ordered_json{{"tol", g.tol}}, outputs);
  return 0;
}

int cmd_shoot(const GlobalOpts& g, double speed) {
  ModelSpec m = load_model(g);
  std::optional<FileShotCache> cache;
  if (!g.cache_dir.empty()) cache.emplace(g.cache_dir);
  const auto shot = shoot_cached(m, speed, g.eps, g.delta, shooting_integrator_defaults(),
                                 cache ? &*cache : nullptr);
  const auto j = shot_summary_json(shot);
  std::cout << j.dump(2) << "\n";
  std::vector<std::string> outputs;
  emit(g, "shot.json", j.dump(2) + "\n", outputs);
  if (g.emit_csv) emit(g, "trajectory.csv", trajectory_csv(shot), outputs);
  write_manifest(g, "shoot", m,
                 ordered_json{{"speed", speed}, {"eps", g.eps}, {"delta", g.delta}}, outputs);
  return shot.admissibility == Admissibility::inconclusive ? 2 : 0;
}

int cmd_speed(const GlobalOpts& g) {
  ModelSpec m = load_model(g);
  std::optional<FileShotCache> cache;
  if (!g.cache_dir.empty()) cache.emplace(g.cache_dir);
  const auto rep = find_threshold(m, g.tol_c, g.eps, g.delta, shooting_integrator_defaults(),
                                  cache ? &*cache : nullptr);
  const auto j = to_json(rep);
  std::cout << j.dump(2) << "\n";
  std::vector<std::string> outputs;
  emit(g, "speed_report.json", j.dump(2) + "\n", outputs);
  write_manifest(g, "speed", m,
                 ordered_json{{"tol_c", g.tol_c}, {"eps", g.eps}, {"delta", g.delta}}, outputs);
  return 0;
}

int cmd_profile(const GlobalOpts& g, double speed, double anchor, const std::string& out_csv,
                const std::string& out_svg) {
  ModelSpec m = load_model(g);
  const auto shot = shoot(m, speed, g.eps, g.delta);
  auto prof = reconstruct(m, shot, anchor);
  const auto edge = front_edge(m, shot);
  prof.tau_is_finite = edge.kind == FrontEdgeKind::finite;
  prof.tau = edge.tau_offset;

  auto j = profile_summary_json(prof);
  j["front_edge"] = to_json(edge);
  j["check_first_integral"] = [&] {
    const auto r = check_first_integral(prof);
    return ordered_json{{"sup", r.sup}, {"l2", r.l2}, {"pass", r.pass}};
  }();
  std::cout << j.dump(2) << "\n";

  std::vector<std::string> outputs;
  if (!out_csv.empty()) {
    write_text_file(out_csv, profile_csv(prof));
    outputs.push_back(out_csv);
  }
  if (!out_svg.empty()) {
    write_text_file(out_svg, profile_svg(prof));
    outputs.push_back(out_svg);
  }
  emit(g, "profile_summary.json", j.dump(2) + "\n", outputs);
  write_manifest(g, "profile", m,
                 ordered_json{{"speed", speed},
                              {"anchor", anchor},
                              {"eps", g.eps},
                              {"delta", g.delta}},
                 outputs);
  return edge.kind == FrontEdgeKind::indeterminate ? 2 : 0;
}

int cmd_pde(const GlobalOpts& g, const PdeConfig& cfg) {
  ModelSpec m = load_model(g);
  const auto run = run_pde(m, cfg);
  auto j = pde_summary_json(run);
  try {
    const auto fit = measure_speed(run);
    j["speed"] = fit.speed;
    j["speed_stderr"] = fit.stderr_;
    j["fit_samples"] = fit.samples_used;
  } catch (const Error& e) {
    j["speed_error"] = e.what();
  }
  std::cout << j.dump(2) << "\n";
  std::vector<std::string> outputs;
  emit(g, "pde_summary.json", j.dump(2) + "\n", outputs);
  if (g.emit_csv || !g.out_dir.empty()) emit(g, "front_series.csv", front_series_csv(run), outputs);
  write_manifest(g, "pde", m,
                 ordered_json{{"cells", cfg.cells},
                              {"length", cfg.length},
                              {"time", cfg.t_end},
                              {"cfl", cfg.cfl}},
                 outputs);
  return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::vector<double>& alphas, bool with_c0) {
  // One row per alpha at gamma = 1: quadrature branches, the closed-form
  // dominant-branch marker (1 below the alpha = 2 crossover, 2 above), the
  // upper bound, and optionally the bisection threshold.
  std::vector<std::string> header = {"alpha",   "branch1",         "branch2", "c_sharp",
                                     "c_star", "dominant_branch"};
  if (with_c0) header.push_back("c0");
  std::vector<std::vector<double>> rows;
  std::string failures;
  for (double a : alphas) {
    try {
      ModelSpec m = build_power_law(a, 1.0, ReactionKind::product);
      audit_assumptions(m, 64);
      const auto b = compute_bounds(m, g.tol);
      double dominant;
      const double scale = std::max(b.c_sharp_branch1, b.c_sharp_branch2);
      if (std::abs(b.c_sharp_branch1 - b.c_sharp_branch2) <= 1e-6 * scale)
        dominant = 0;  // tie
      else
        dominant = b.c_sharp_branch1 > b.c_sharp_branch2 ? 1 : 2;
      std::vector<double> row = {a,        b.c_sharp_branch1, b.c_sharp_branch2,
                                 b.c_sharp, b.c_star,          dominant};
      if (with_c0) {
        ModelSpec ms = build_power_law(a, 1.0, ReactionKind::product);
        audit_assumptions(ms, 64);
        row.push_back(find_threshold(ms, g.tol_c, g.eps, g.delta).c0);
      }
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      failures += std::string("# alpha=") + format_double(a) + " failed: " + e.what() + "\n";
    }
  }
  const std::string table = csv_table(header, rows) + failures;
  std::cout << table;
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    write_text_file(fs::path(g.out_dir) / "sweep.csv", table);
  }
  return 0;
}

int cmd_report(const GlobalOpts& g, bool with_pde) {
  ModelSpec m = load_model(g);
  std::vector<std::string> outputs;
  ordered_json bundle;
  bundle["model"] = model_to_json(m);
  bundle["audit"] = [&] {
    ModelSpec mm = m;
    return to_json(audit_assumptions(mm, 64));
  }();

  const auto b = compute_bounds(m, g.tol);
  bundle["bounds"] = to_json(b);

  if (!m.shooting_supported()) {
    bundle["shooting"] = {{"status", "skipped"},
                          {"reason", "corner derivatives not finite and positive; bounds only"}};
    std::cout << bundle.dump(2) << "\n";
    emit(g, "report.json", bundle.dump(2) + "\n", outputs);
    write_manifest(g, "report", m, ordered_json{{"tol", g.tol}}, outputs);
    return 0;
  }

  std::optional<FileShotCache> cache;
  if (!g.cache_dir.empty()) cache.emplace(g.cache_dir);
  try {
    // Tight bracket so the classification shots sit inside the resolvable
    // neighborhood of the threshold; their stop offset is two decades above
    // the search offset to keep the tail-fit window clear of the bracket
    // bias.
    const double search_tol = std::min(g.tol_c, 2e-5);
    auto rep =
        find_threshold(m, search_tol, g.eps, g.delta, shooting_integrator_defaults(),
                       cache ? &*cache : nullptr);
    bundle["speed"] = to_json(rep);
    const double delta_classify = std::min(1e-4, g.delta * 100);

    auto shot0 = shoot(m, rep.c0, g.eps, delta_classify);
    auto prof0 = reconstruct(m, shot0, 0.5);
    auto reg0 = classify_regime(m, rep.c0, rep.c0, shot0);
    auto lo_shot = shoot(m, rep.c_lo, g.eps, delta_classify);
    const auto edge0 = front_edge(m, lo_shot);
    prof0.tau_is_finite = edge0.kind == FrontEdgeKind::finite;
    prof0.tau = edge0.tau_offset;
    bundle["profile_at_c0"] = profile_summary_json(prof0);
    bundle["profile_at_c0"]["regime"] = front_type_name(reg0.front);
    bundle["profile_at_c0"]["tail_p"] = reg0.p;
    bundle["profile_at_c0"]["tail_A"] = reg0.A;
    bundle["profile_at_c0"]["front_edge"] = to_json(edge0);
    emit(g, "profile_c0.csv", profile_csv(prof0), outputs);
    emit(g, "profile_c0.svg", profile_svg(prof0), outputs);

    const double c1 = rep.c0 + 0.5;
    auto shot1 = shoot(m, c1, g.eps, delta_classify);
    auto prof1 = reconstruct(m, shot1, 0.5);
    auto reg1 = classify_regime(m, c1, rep.c0, shot1);
    const auto edge1 = front_edge(m, shot1);
    prof1.tau_is_finite = edge1.kind == FrontEdgeKind::finite;
    prof1.tau = edge1.tau_offset;
    bundle["profile_above_c0"] = profile_summary_json(prof1);
    bundle["profile_above_c0"]["regime"] = front_type_name(reg1.front);
    bundle["profile_above_c0"]["tail_p"] = reg1.p;
    bundle["profile_above_c0"]["tail_A"] = reg1.A;
    bundle["profile_above_c0"]["front_edge"] = to_json(edge1);
    emit(g, "profile_above_c0.csv", profile_csv(prof1), outputs);
    emit(g, "profile_above_c0.svg", profile_svg(prof1), outputs);

    if (with_pde) {
      PdeConfig pc;
      auto run = run_pde(m, pc);
      auto pj = pde_summary_json(run);
      try {
        const auto fit = measure_speed(run);
        pj["speed"] = fit.speed;
        pj["speed_stderr"] = fit.stderr_;
        pj["rel_dev_from_c0"] = std::abs(fit.speed - rep.c0) / rep.c0;
      } catch (const Error& e) {
        pj["speed_error"] = e.what();
      }
      bundle["pde"] = pj;
      emit(g, "front_series.csv", front_series_csv(run), outputs);
    }
  } catch (const Error& e) {
    bundle["shooting"] = {{"status", "failed"}, {"error", e.what()}};
  }

  std::cout << bundle.dump(2) << "\n";
  emit(g, "report.json", bundle.dump(2) + "\n", outputs);
  write_manifest(g, "report", m,
                 ordered_json{{"tol", g.tol}, {"tol_c", g.tol_c}, {"eps", g.eps},
                              {"delta", g.delta}},
                 outputs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"traveling wavefronts and threshold speeds for doubly degenerate "
               "reaction-diffusion systems"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--model", g.model_path, "model config JSON")->envname("DEGENWAVE_MODEL");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--cache", g.cache_dir, "shot cache directory");
  app.add_option("--tol", g.tol, "quadrature tolerance");
  app.add_option("--tol-c", g.tol_c, "threshold bracket width");
  app.add_option("--eps", g.eps, "launch offset");
  app.add_option("--delta", g.delta, "stop offset");
  app.add_flag("--json,!--csv", g.emit_json, "prefer JSON (default) or CSV emission");

  auto* sc_bounds = app.add_subcommand("bounds", "lower/upper threshold-speed bounds");

  double speed_arg = 0;
  auto* sc_shoot = app.add_subcommand("shoot", "integrate one trajectory and classify it");
  sc_shoot->add_option("--speed", speed_arg, "wave speed")->required();

  auto* sc_speed = app.add_subcommand("speed", "bisect the threshold speed");

  double anchor = 0.5;
  std::string prof_csv, prof_svg;
  auto* sc_profile = app.add_subcommand("profile", "reconstruct the wavefront profile");
  sc_profile->add_option("--speed", speed_arg, "wave speed")->required();
  sc_profile->add_option("--anchor", anchor, "eta value placed at xi = 0");
  sc_profile->add_option("--out-csv", prof_csv, "profile CSV path");
  sc_profile->add_option("--svg", prof_svg, "profile SVG path");

  PdeConfig pde_cfg;
  auto* sc_pde = app.add_subcommand("pde", "time-dependent simulation cross-check");
  sc_pde->add_option("--cells", pde_cfg.cells, "grid cells");
  sc_pde->add_option("--length", pde_cfg.length, "domain length");
  sc_pde->add_option("--time", pde_cfg.t_end, "end time");
  sc_pde->add_option("--cfl", pde_cfg.cfl, "CFL safety factor");
  sc_pde->add_option("--x0", pde_cfg.init.x0, "initial step position");
  bool reaction_off = false;
  sc_pde->add_flag("--reaction-off", reaction_off, "disable the reaction terms");

  std::vector<double> alphas;
  bool with_c0 = false;
  auto* sc_sweep = app.add_subcommand("sweep", "bounds table over g-exponents (gamma = 1)");
  sc_sweep->add_option("--alphas", alphas, "g-exponent grid")->delimiter(',');
  sc_sweep->add_flag("--with-c0", with_c0, "also bisect the threshold per row");

  bool with_pde = false;
  auto* sc_report = app.add_subcommand("report", "bundled bounds/threshold/profile report");
  sc_report->add_flag("--with-pde", with_pde, "include the simulation cross-check");

  CLI11_PARSE(app, argc, argv);
  g.emit_csv = !g.emit_json;
  // The profile subcommand defaults to a coarser stop offset: its edge test
  // refines tenfold three times from there.
  const bool delta_given = app.count("--delta") > 0;

  try {
    if (sc_bounds->parsed()) return cmd_bounds(g);
    if (sc_shoot->parsed()) return cmd_shoot(g, speed_arg);
    if (sc_speed->parsed()) return cmd_speed(g);
    if (sc_profile->parsed()) {
      if (!delta_given) g.delta = 1e-4;
      return cmd_profile(g, speed_arg, anchor, prof_csv, prof_svg);
    }
    if (sc_pde->parsed()) {
      pde_cfg.reaction_off = reaction_off;
      return cmd_pde(g, pde_cfg);
    }
    if (sc_sweep->parsed()) return cmd_sweep(g, alphas, with_c0);
    if (sc_report->parsed()) return cmd_report(g, with_pde);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::inconclusive ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
