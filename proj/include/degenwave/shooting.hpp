#pragma once

// Shooting on the scalar reduction of the wave system. Writing the diffusing
// component as a function B(eta) of the reacting one turns the whole wave
// problem into a single singular ODE on (0,1):
//
//   dB/deta = c^2 * (1 - eta - B) / (g(eta) h(B) f(eta, B)),   B(0) = 1.
//
// Both endpoints are removable/degenerate singularities, so integration
// launches at eta = eps from the second-order series
//   B(eps) = 1 - eps + (h(1) g'(0) f_s(0,1) / c^2) * eps^2
// (the reduced slope at the left corner is exactly -1), and stops at
// eta = 1 - delta. A speed is admissible iff B reaches 0 at eta = 1; at the
// stopping offset this becomes a comparison of B(1-delta) against the sharp
// tail scale  C(c)*sqrt(delta),  C(c) = c*sqrt(2/(g(1) h'(0) f_r(1,0))),
// with an explicit inconclusive band instead of silent guessing. The
// threshold speed c0 is located by bisection between the computable bounds
// c_sharp and c_star, below/above which non-/admissibility is guaranteed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degenwave/bounds.hpp"
#include "degenwave/error.hpp"
#include "degenwave/model.hpp"
#include "degenwave/numerics.hpp"

namespace degenwave {

enum class Admissibility { admissible, not_admissible, inconclusive };

enum class Regime { non_admissible, sharp_candidate, classical, indeterminate };

inline const char* admissibility_name(Admissibility a) {
  switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::not_admissible: return "non_admissible";
    case Admissibility::inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::non_admissible: return "non_admissible";
    case Regime::sharp_candidate: return "sharp_candidate";
    case Regime::classical: return "classical";
    case Regime::indeterminate: return "indeterminate";
  }
  return "?";
}

struct ShotResult {
  double c = 0;
  double eps = 0;    // launch offset
  double delta = 0;  // stop offset
  std::vector<double> eta, B;  // sampled trajectory
  double eta_end = 0, B_end = 0;

  // Tail diagnostics: least-squares fit of B ~ A*(1-eta)^p over the last two
  // decades of 1-eta before the stop offset.
  double tail_p = 0, tail_A = 0;
  bool tail_fit_ok = false;

  double sharp_amplitude = 0;  // C(c) above
  double a_thr = 0;            // admissibility threshold 2*C(c)*sqrt(delta) + delta
  Admissibility admissibility = Admissibility::inconclusive;
  bool admissible = false;
  Regime regime = Regime::indeterminate;

  bool diagonal_breach = false;  // trajectory crossed below B = 1 - eta - 1e-9
  bool floor_hit = false;        // trajectory fell through B = delta^2
  std::size_t steps = 0;
  double launch_coeff = 0;  // h(1) g'(0) f_s(0,1) / c^2
};

// Tolerance on the barrier B >= 1 - eta; crossing deeper than this is a
// numerical breach and terminates the shot.
inline constexpr double kDiagonalDriftTol = 1e-9;

// The endpoint-adjacent region at small delta forces an explicit integrator
// to stability-limited steps, so the shooting default raises the step cap
// well above the general-purpose one.
inline IntegratorConfig shooting_integrator_defaults() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.max_steps = 100'000'000;
  return cfg;
}

namespace detail {

// Sample grid: geometric toward both endpoints (denser in the tail-fit
// window), uniform across the interior. The grid depends only on (eps,
// delta), so shots at different speeds share it.
inline std::vector<double> shot_sample_grid(double eps, double delta) {
  std::vector<double> pts;
  pts.reserve(1500);
  const double left_cap = 0.01, right_cap = 0.01;
  pts.push_back(2.0 * eps);  // launch-slope diagnostic reads B here
  // left: eps up to 0.01, 12 points per decade
  for (double x = eps; x < left_cap; x *= std::pow(10.0, 1.0 / 12.0)) pts.push_back(x);
  // interior: uniform
  for (double x = left_cap; x < 1.0 - right_cap; x += 0.0025) pts.push_back(x);
  // right: s = 1 - eta from 0.01 down to delta; refine inside [100*delta, delta]
  const double fit_lo = 100.0 * delta;
  for (double s = right_cap; s > fit_lo; s /= std::pow(10.0, 1.0 / 12.0)) pts.push_back(1.0 - s);
  for (double s = std::min(fit_lo, right_cap); s > delta; s /= std::pow(10.0, 1.0 / 48.0))
    pts.push_back(1.0 - s);
  pts.push_back(1.0 - delta);
  std::sort(pts.begin(), pts.end());
  // merge points the exponent ladders placed within rounding of each other
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return b - a < 1e-12 * std::max(a, 1e-4); }),
            pts.end());
  while (!pts.empty() && pts.front() < eps) pts.erase(pts.begin());
  while (!pts.empty() && pts.back() > 1.0 - delta) pts.pop_back();
  return pts;
}

struct TailFit {
  double p = 0, A = 0;
  bool ok = false;
};

// Least squares of log B against log(1-eta).
inline TailFit fit_tail(const std::vector<double>& eta, const std::vector<double>& B,
                        double window_lo_eta) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] < window_lo_eta || eta[i] >= 1.0 || B[i] <= 0) continue;
    const double x = std::log(1.0 - eta[i]);
    const double y = std::log(B[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  TailFit f;
  if (n < 8) return f;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return f;
  f.p = (n * sxy - sx * sy) / denom;
  f.A = std::exp((sy - f.p * sx) / n);
  f.ok = true;
  return f;
}

}  // namespace detail

inline Admissibility classify_admissibility(const ShotResult& shot) {
  if (shot.B_end < shot.a_thr) return Admissibility::admissible;
  if (shot.B_end <= 2.0 * shot.a_thr) return Admissibility::inconclusive;
  return Admissibility::not_admissible;
}

// Boolean view of the classification; the inconclusive band is an error the
// caller resolves by shrinking delta and re-shooting.
inline bool is_admissible(const ShotResult& shot) {
  switch (classify_admissibility(shot)) {
    case Admissibility::admissible: return true;
    case Admissibility::not_admissible: return false;
    case Admissibility::inconclusive: break;
  }
  fail(Errc::inconclusive, "B(1-delta) = " + std::to_string(shot.B_end) +
                               " inside the inconclusive band [" + std::to_string(shot.a_thr) +
                               ", " + std::to_string(2 * shot.a_thr) +
                               "] at c = " + std::to_string(shot.c) +
                               "; shrink delta and re-shoot");
}

inline ShotResult shoot(const ModelSpec& m, double c, double eps = 1e-6, double delta = 1e-6,
                        IntegratorConfig cfg = shooting_integrator_defaults()) {
  m.require_shooting_support();
  if (!(c > 0)) fail(Errc::invalid_config, "shoot needs c > 0");
  if (!(eps > 0) || eps > 1e-4) fail(Errc::invalid_config, "launch offset must be in (0, 1e-4]");
  if (!(delta > 0) || delta > 1e-4) fail(Errc::invalid_config, "stop offset must be in (0, 1e-4]");

  ShotResult shot;
  shot.c = c;
  shot.eps = eps;
  shot.delta = delta;
  shot.launch_coeff = m.h(1.0) * m.dg0 * m.dfdn01 / (c * c);
  shot.sharp_amplitude = c * std::sqrt(2.0 / (m.g(1.0) * m.dh0 * m.dfdb10));
  shot.a_thr = 2.0 * shot.sharp_amplitude * std::sqrt(delta) + delta;

  const double B_launch = 1.0 - eps + shot.launch_coeff * eps * eps;
  if (B_launch >= 1.0 || B_launch <= 1.0 - eps)
    fail(Errc::singular_launch,
         "launch series invalid at eps = " + std::to_string(eps) + "; shrink eps");

  const double c2 = c * c;
  OdeRhs rhs = [&m, c2](double etav, std::span<const double> y, std::span<double> dy) {
    const double B = y[0];
    dy[0] = c2 * (1.0 - etav - B) / (m.g(etav) * m.h(B) * m.f(etav, B));
  };

  const double floor = delta * delta;
  std::vector<EventSpec> events(2);
  events[0].fn = [](double etav, std::span<const double> y) {
    return y[0] - (1.0 - etav) + kDiagonalDriftTol;
  };
  events[0].direction = EventDirection::falling;
  events[0].terminal = true;
  events[0].label = "diagonal";
  events[1].fn = [floor](double, std::span<const double> y) { return y[0] - floor; };
  events[1].direction = EventDirection::falling;
  events[1].terminal = true;
  events[1].label = "floor";

  const auto grid = detail::shot_sample_grid(eps, delta);
  const double y0[1] = {B_launch};
  auto traj = integrate_ivp(rhs, eps, 1.0 - delta, std::span<const double>(y0, 1), cfg, events,
                            grid);

  shot.eta.reserve(traj.t.size());
  shot.B.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    shot.eta.push_back(traj.t[i]);
    shot.B.push_back(traj.y[i][0]);
  }
  shot.eta_end = traj.t_end;
  shot.B_end = traj.y_end[0];
  shot.steps = traj.steps_accepted;
  for (const auto& hit : traj.events) {
    if (hit.index == 0) shot.diagonal_breach = true;
    if (hit.index == 1) shot.floor_hit = true;
  }

  const auto fit = detail::fit_tail(shot.eta, shot.B, 1.0 - 100.0 * delta);
  shot.tail_p = fit.p;
  shot.tail_A = fit.A;
  shot.tail_fit_ok = fit.ok;

  shot.admissibility = classify_admissibility(shot);
  shot.admissible = shot.admissibility == Admissibility::admissible;
  if (!shot.admissible) {
    shot.regime = Regime::non_admissible;
  } else if (fit.ok && fit.p >= 0.35 && fit.p <= 0.65) {
    shot.regime = Regime::sharp_candidate;
  } else if (fit.ok && fit.p >= 0.85 && fit.p <= 1.15) {
    shot.regime = Regime::classical;
  } else {
    shot.regime = Regime::indeterminate;
  }
  return shot;
}

// Optional memoization hook; bisection revisits speeds when delta shrinks, so
// the CLI backs this with a directory of serialized shots.
class ShotCache {
 public:
  virtual ~ShotCache() = default;
  virtual std::optional<ShotResult> load(const ModelSpec& m, double c, double eps, double delta,
                                         const IntegratorConfig& cfg) = 0;
  virtual void store(const ModelSpec& m, const IntegratorConfig& cfg, const ShotResult& shot) = 0;
};

inline ShotResult shoot_cached(const ModelSpec& m, double c, double eps, double delta,
                               const IntegratorConfig& cfg, ShotCache* cache) {
  if (cache) {
    if (auto hit = cache->load(m, c, eps, delta, cfg)) return *hit;
  }
  ShotResult shot = shoot(m, c, eps, delta, cfg);
  if (cache) cache->store(m, cfg, shot);
  return shot;
}

struct SpeedReport {
  std::string model_name;
  double c_lo = 0, c_hi = 0;   // final bracket: non-admissible at c_lo, admissible at c_hi
  double c0 = 0;               // bracket midpoint
  double bracket_width = 0;
  double c_sharp = 0, c_star = 0;  // bound context
  std::vector<ShotResult> shots;   // every evaluated speed, sorted by c
  double eps = 0, delta_initial = 0, delta_final = 0;
  double tol_c = 0;
  int delta_refinements = 0;  // total inconclusive-triggered refinements
};

// Locates the threshold speed by bisecting admissibility over the bracket
// seeded just outside [c_sharp, c_star]. An inconclusive shot shrinks delta
// tenfold (at most three times) before the status is surfaced.
inline SpeedReport find_threshold(const ModelSpec& m, double tol_c = 1e-3, double eps = 1e-6,
                                  double delta = 1e-6,
                                  IntegratorConfig cfg = shooting_integrator_defaults(),
                                  ShotCache* cache = nullptr) {
  m.require_shooting_support();
  if (!(tol_c > 0)) fail(Errc::invalid_config, "tol_c must be positive");
  const auto bounds = compute_bounds(m);

  SpeedReport rep;
  rep.model_name = m.name;
  rep.c_sharp = bounds.c_sharp;
  rep.c_star = bounds.c_star;
  rep.eps = eps;
  rep.delta_initial = delta;
  rep.delta_final = delta;
  rep.tol_c = tol_c;

  auto evaluate = [&](double c) -> bool {
    double d = delta;
    for (int attempt = 0;; ++attempt) {
      ShotResult shot = shoot_cached(m, c, eps, d, cfg, cache);
      const auto adm = classify_admissibility(shot);
      if (adm != Admissibility::inconclusive || attempt == 3) {
        rep.delta_final = std::min(rep.delta_final, d);
        rep.shots.push_back(std::move(shot));
        if (adm == Admissibility::inconclusive)
          fail(Errc::inconclusive, "admissibility at c = " + std::to_string(c) +
                                       " still inconclusive at delta = " + std::to_string(d));
        return adm == Admissibility::admissible;
      }
      d /= 10.0;
      ++rep.delta_refinements;
    }
  };

  const double lo_seed = std::max(bounds.c_sharp * (1.0 - 1e-3), 1e-8);
  const double hi_seed = bounds.c_star * (1.0 + 1e-3);
  const auto bracket = bisect_monotone(evaluate, lo_seed, hi_seed, tol_c);

  rep.c_lo = bracket.lo;
  rep.c_hi = bracket.hi;
  rep.c0 = 0.5 * (bracket.lo + bracket.hi);
  rep.bracket_width = bracket.width();
  std::sort(rep.shots.begin(), rep.shots.end(),
            [](const ShotResult& a, const ShotResult& b) { return a.c < b.c; });
  return rep;
}

enum class FrontType { sharp, classical, indeterminate };

inline const char* front_type_name(FrontType t) {
  switch (t) {
    case FrontType::sharp: return "sharp";
    case FrontType::classical: return "classical";
    case FrontType::indeterminate: return "indeterminate";
  }
  return "?";
}

struct RegimeReport {
  FrontType front = FrontType::indeterminate;
  double p = 0, A = 0;
  double amplitude_ref = 0;      // C(c)
  double amplitude_rel_err = 0;  // |A - C(c)| / C(c)
  double c = 0, c0 = 0;
};

// Front-type classification of an admissible shot from its tail fit: sharp
// when the exponent is near 1/2 and the amplitude matches C(c) within 25%,
// classical when the exponent is near 1. Anything else is reported as
// indeterminate, never coerced.
inline RegimeReport classify_regime(const ModelSpec& m, double c, double c0,
                                    const ShotResult& shot) {
  if (!is_admissible(shot))
    fail(Errc::not_admissible, "classify_regime needs an admissible shot");
  RegimeReport rep;
  rep.c = c;
  rep.c0 = c0;
  rep.p = shot.tail_p;
  rep.A = shot.tail_A;
  rep.amplitude_ref = c * std::sqrt(2.0 / (m.g(1.0) * m.dh0 * m.dfdb10));
  rep.amplitude_rel_err = std::abs(rep.A - rep.amplitude_ref) / rep.amplitude_ref;
  if (shot.tail_fit_ok && rep.p >= 0.35 && rep.p <= 0.65 && rep.amplitude_rel_err <= 0.25)
    rep.front = FrontType::sharp;
  else if (shot.tail_fit_ok && rep.p >= 0.85 && rep.p <= 1.15)
    rep.front = FrontType::classical;
  else
    rep.front = FrontType::indeterminate;
  return rep;
}

}  // namespace degenwave
