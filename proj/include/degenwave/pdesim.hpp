#pragma once

// Independent cross-validation: a method-of-lines finite-volume integration
// of the time-dependent system on a finite zero-flux domain, tracking the
// emergent front speed. Nothing here feeds back into the shooting pipeline;
// agreement between the measured speed and the threshold speed is a
// diagnostic, not a theorem.

#include <algorithm>
#include <cmath>
#include <vector>

#include "degenwave/error.hpp"
#include "degenwave/model.hpp"

namespace degenwave {

enum class FaceDiffusivity { arithmetic, upwind_weighted };

struct InitialData {
  double x0 = 40.0;   // step position
  double width = 2.0; // smoothing width
};

struct PdeConfig {
  double length = 400.0;
  int cells = 4000;
  double t_end = 300.0;
  double cfl = 0.4;
  InitialData init;
  double output_dt = 0.5;  // front-series cadence
  bool reaction_off = false;
  // Harmonic face means lock the front at degenerate cells where the
  // diffusivity vanishes; the arithmetic mean lets it creep, matching
  // finite-speed propagation qualitatively.
  FaceDiffusivity face = FaceDiffusivity::arithmetic;
};

struct PdeRun {
  std::vector<double> time;   // front-position series
  std::vector<double> front;  // level set b = 1/2 by linear interpolation
  double t_end = 0;
  int cells = 0;
  double dx = 0, dt = 0;
  std::size_t steps = 0;
  long clip_count = 0;              // states nudged back into [0,1]
  double clipped_mass = 0;          // total mass removed by clipping
  double mass_drift_step_max = 0;   // max per-step |d integral(n+b) dx| of the raw update
  double mass_drift_per_time = 0;   // net drift of the clipped state / t_end
  bool front_formed = false;
  bool front_reached_boundary = false;
  std::vector<double> x, n_final, b_final;
};

namespace detail {

inline double front_position(const std::vector<double>& x, const std::vector<double>& b) {
  // Rightmost downward crossing of the half level.
  for (std::size_t i = b.size() - 1; i > 0; --i) {
    if (b[i - 1] >= 0.5 && b[i] < 0.5) {
      const double t = (b[i - 1] - 0.5) / (b[i - 1] - b[i]);
      return x[i - 1] + t * (x[i] - x[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline PdeRun run_pde(const ModelSpec& m, const PdeConfig& cfg) {
  if (!m.audited) fail(Errc::not_audited, "run_pde requires an audited model");
  if (cfg.cells < 100) fail(Errc::invalid_config, "need at least 100 cells");
  const double dx = cfg.length / cfg.cells;
  if (dx > 0.5) fail(Errc::invalid_config, "cell size must resolve the front (dx <= 0.5)");
  if (!(cfg.t_end > 0) || !(cfg.cfl > 0) || cfg.cfl > 1)
    fail(Errc::invalid_config, "bad time/cfl configuration");

  const int N = cfg.cells;
  PdeRun run;
  run.cells = N;
  run.dx = dx;
  run.x.resize(N);
  for (int i = 0; i < N; ++i) run.x[i] = (i + 0.5) * dx;

  std::vector<double> n(N, 1.0), b(N), n_new(N), b_new(N), D(N);
  for (int i = 0; i < N; ++i)
    b[i] = std::clamp(0.5 * (1.0 - std::tanh((run.x[i] - cfg.init.x0) / cfg.init.width)), 0.0, 1.0);

  // Global diffusivity bound over the invariant box [0,1]^2; the states stay
  // inside it, so the base step computed here is stable for the whole run.
  double D_bound = 0;
  for (int i = 0; i <= 256; ++i)
    for (int j = 0; j <= 256; ++j)
      D_bound = std::max(D_bound, m.g(i / 256.0) * m.h(j / 256.0));
  const double dt_base =
      cfg.cfl * std::min(dx * dx / (2.0 * std::max(D_bound, 1e-300)), 1.0 / (4.0 * m.L2));
  run.dt = dt_base;

  double t = 0;
  double next_output = 0;
  double total_mass_prev = 0;
  for (int i = 0; i < N; ++i) total_mass_prev += n[i] + b[i];
  total_mass_prev *= dx;
  const double mass0 = total_mass_prev;

  while (t < cfg.t_end) {
    double dt = std::min(dt_base, cfg.t_end - t);
    for (int i = 0; i < N; ++i) D[i] = m.g(n[i]) * m.h(b[i]);

    int halvings = 0;
    for (;;) {
      // flux divergence with zero-flux boundaries, then reaction
      for (int i = 0; i < N; ++i) {
        double flux_r = 0, flux_l = 0;
        if (i + 1 < N) {
          const double Df = cfg.face == FaceDiffusivity::arithmetic
                                ? 0.5 * (D[i] + D[i + 1])
                                : (b[i] >= b[i + 1] ? D[i] : D[i + 1]);
          flux_r = Df * (b[i + 1] - b[i]) / dx;
        }
        if (i > 0) {
          const double Df = cfg.face == FaceDiffusivity::arithmetic
                                ? 0.5 * (D[i - 1] + D[i])
                                : (b[i - 1] >= b[i] ? D[i - 1] : D[i]);
          flux_l = Df * (b[i] - b[i - 1]) / dx;
        }
        const double react = cfg.reaction_off ? 0.0 : m.f(n[i], b[i]);
        n_new[i] = n[i] - dt * react;
        b_new[i] = b[i] + dt * ((flux_r - flux_l) / dx + react);
      }

      // The step is valid if the diffusivities of the new state still honor
      // the step size; growth past the precomputed bound rejects and halves.
      double D_after = 0;
      for (int i = 0; i < N; ++i) {
        if (!std::isfinite(n_new[i]) || !std::isfinite(b_new[i]))
          fail(Errc::non_finite_state, "non-finite state at t=" + std::to_string(t));
        D_after = std::max(D_after, m.g(std::clamp(n_new[i], 0.0, 1.0)) *
                                        m.h(std::clamp(b_new[i], 0.0, 1.0)));
      }
      if (dt <= cfg.cfl * dx * dx / (2.0 * std::max(D_after, 1e-300))) break;
      if (++halvings > 20)
        fail(Errc::cfl_violation, "step kept violating the diffusive bound after 20 halvings");
      dt *= 0.5;
    }

    // The raw update conserves integral(n+b) exactly up to roundoff: the
    // reaction terms cancel pointwise and the zero-flux divergence
    // telescopes. Measure that before clipping; clipping (the seeded initial
    // data can push b past 1 behind the front) removes mass deliberately and
    // is accounted separately.
    double mass_raw = 0;
    for (int i = 0; i < N; ++i) mass_raw += n_new[i] + b_new[i];
    mass_raw *= dx;
    run.mass_drift_step_max =
        std::max(run.mass_drift_step_max, std::abs(mass_raw - total_mass_prev));

    for (int i = 0; i < N; ++i) {
      if (n_new[i] < 0.0 || n_new[i] > 1.0) {
        if (n_new[i] < -1e-10 || n_new[i] > 1.0 + 1e-10) ++run.clip_count;
        run.clipped_mass += std::abs(n_new[i] - std::clamp(n_new[i], 0.0, 1.0)) * dx;
        n_new[i] = std::clamp(n_new[i], 0.0, 1.0);
      }
      if (b_new[i] < 0.0 || b_new[i] > 1.0) {
        if (b_new[i] < -1e-10 || b_new[i] > 1.0 + 1e-10) ++run.clip_count;
        run.clipped_mass += std::abs(b_new[i] - std::clamp(b_new[i], 0.0, 1.0)) * dx;
        b_new[i] = std::clamp(b_new[i], 0.0, 1.0);
      }
    }

    n.swap(n_new);
    b.swap(b_new);
    t += dt;
    ++run.steps;

    double total_mass = 0;
    for (int i = 0; i < N; ++i) total_mass += n[i] + b[i];
    total_mass *= dx;
    total_mass_prev = total_mass;

    if (t >= next_output || t >= cfg.t_end) {
      const double xf = detail::front_position(run.x, b);
      if (std::isfinite(xf)) {
        run.front_formed = true;
        if (xf > cfg.length - 2 * dx) run.front_reached_boundary = true;
        run.time.push_back(t);
        run.front.push_back(xf);
      } else if (run.front_formed) {
        // the level set existed and is gone: the wave filled the domain
        run.front_reached_boundary = true;
      }
      next_output += cfg.output_dt;
    }
  }

  run.t_end = t;
  run.mass_drift_per_time = std::abs(total_mass_prev - mass0) / cfg.t_end;
  run.n_final = std::move(n);
  run.b_final = std::move(b);
  return run;
}

struct SpeedFit {
  double speed = 0;
  double stderr_ = 0;
  std::size_t samples_used = 0;
};

// Ordinary least squares on the front series past the transient cutoff.
inline SpeedFit measure_speed(const PdeRun& run, double transient_frac = 0.25) {
  if (!run.front_formed) fail(Errc::front_lost, "front level set never formed");
  if (run.front_reached_boundary) fail(Errc::front_lost, "front reached the domain boundary");
  const double t_cut = transient_frac * run.t_end;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < run.time.size(); ++i) {
    if (run.time[i] < t_cut) continue;
    sx += run.time[i];
    sy += run.front[i];
    sxx += run.time[i] * run.time[i];
    sxy += run.time[i] * run.front[i];
    ++n;
  }
  if (n < 20) fail(Errc::front_lost, "fewer than 20 front samples after the transient");
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  SpeedFit fit;
  fit.speed = (nn * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.speed * sx) / nn;
  double ss_res = 0, ss_t = 0;
  const double t_mean = sx / nn;
  for (std::size_t i = 0; i < run.time.size(); ++i) {
    if (run.time[i] < t_cut) continue;
    const double r = run.front[i] - (intercept + fit.speed * run.time[i]);
    ss_res += r * r;
    ss_t += (run.time[i] - t_mean) * (run.time[i] - t_mean);
  }
  fit.stderr_ = std::sqrt(ss_res / (nn - 2.0) / ss_t);
  fit.samples_used = n;
  return fit;
}

}  // namespace degenwave
