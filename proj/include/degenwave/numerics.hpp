#pragma once

// Shared numerical kernels: an adaptive embedded Runge-Kutta integrator with
// dense output and event detection, adaptive Gauss-Kronrod quadrature with
// endpoint-singularity splitting, bracketed bisection, and a monotone cubic
// interpolant used by the trajectory post-processing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "degenwave/error.hpp"

namespace degenwave {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 2'000'000;  // attempted steps (accepted + rejected)
  double min_step_frac = 1e-14;       // of the interval length
};

enum class EventDirection { any, falling, rising };

struct EventSpec {
  std::function<double(double, std::span<const double>)> fn;
  EventDirection direction = EventDirection::any;
  bool terminal = false;
  std::string label;
};

struct EventHit {
  std::size_t index = 0;  // position in the EventSpec list
  double t = 0;
  std::vector<double> y;
};

struct Trajectory {
  std::vector<double> t;               // requested sample points actually reached
  std::vector<std::vector<double>> y;  // state at each sample point
  double t_end = 0;                    // where integration stopped
  std::vector<double> y_end;
  std::vector<EventHit> events;
  bool event_terminated = false;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double kA21 = 1.0 / 5.0;
inline constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
inline constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
inline constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                        kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
inline constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                        kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
inline constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0,
                        kA75 = -2187.0 / 6784.0, kA76 = 11.0 / 84.0;
inline constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
// Difference between the 5th-order weights and the embedded 4th-order weights.
inline constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                        kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// Dense-output coefficients for the 4th-order continuous extension.
inline constexpr double kD1 = -12715105075.0 / 11282082432.0;
inline constexpr double kD3 = 87487479700.0 / 32700410799.0;
inline constexpr double kD4 = -10690763975.0 / 1880347072.0;
inline constexpr double kD5 = 701980252875.0 / 199316789632.0;
inline constexpr double kD6 = -1453857185.0 / 822651844.0;
inline constexpr double kD7 = 69997945.0 / 29380423.0;

// Continuous extension over one accepted step, y(t0 + theta*h) for theta in [0,1].
struct DenseSegment {
  double t0 = 0, h = 0;
  std::vector<double> r1, r2, r3, r4, r5;

  void eval(double theta, std::span<double> out) const {
    const double s = theta, s1 = 1.0 - theta;
    for (std::size_t i = 0; i < r1.size(); ++i) {
      out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
    }
  }
};

}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t1 (t0 < t1) with the Dormand-Prince
// 5(4) pair. Sample states are produced at the (sorted, in-range) points of
// t_eval via dense output. Events are located on the dense output by
// bisection to 1e-12 in t; a terminal event stops the integration there.
inline Trajectory integrate_ivp(const OdeRhs& rhs, double t0, double t1,
                                std::span<const double> y0, const IntegratorConfig& cfg,
                                std::span<const EventSpec> events = {},
                                std::span<const double> t_eval = {}) {
  if (!(t1 > t0)) fail(Errc::invalid_config, "integrate_ivp requires t1 > t0");
  if (y0.empty()) fail(Errc::invalid_config, "empty initial state");
  const std::size_t n = y0.size();
  const double interval = t1 - t0;
  const double h_min = cfg.min_step_frac * interval;

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> ytmp(n), ynew(n), ystage(n);
  std::vector<double> ev_prev(events.size()), ev_curr(events.size());

  Trajectory out;
  out.t.reserve(t_eval.size());
  out.y.reserve(t_eval.size());

  double t = t0;
  rhs(t, y, k1);

  std::size_t next_eval = 0;
  while (next_eval < t_eval.size() && t_eval[next_eval] < t0) ++next_eval;
  if (next_eval < t_eval.size() && t_eval[next_eval] == t0) {
    out.t.push_back(t0);
    out.y.emplace_back(y);
    ++next_eval;
  }

  for (std::size_t i = 0; i < events.size(); ++i) ev_prev[i] = events[i].fn(t, y);

  // Initial step from the scaled magnitudes of y and y'.
  double h;
  {
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    h = (d1 > 1e-30) ? 0.01 * d0 / d1 : 1e-6 * interval;
    h = std::clamp(h, std::max(h_min, 1e-10 * interval), interval);
  }

  const double kSafety = 0.9, kMinFac = 0.2, kMaxFac = 5.0;
  double max_fac = kMaxFac;
  std::size_t attempts = 0;
  bool done = false;

  while (!done) {
    if (++attempts > cfg.max_steps) {
      fail(Errc::max_steps_exceeded,
           "exceeded " + std::to_string(cfg.max_steps) + " steps at t=" + std::to_string(t));
    }
    bool last_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      last_step = true;
    } else if (h < h_min) {
      fail(Errc::step_size_underflow, "step size underflow at t=" + std::to_string(t));
    }

    for (std::size_t i = 0; i < n; ++i) ystage[i] = y[i] + h * detail::kA21 * k1[i];
    rhs(t + detail::kC2 * h, ystage, k2);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (detail::kA31 * k1[i] + detail::kA32 * k2[i]);
    rhs(t + detail::kC3 * h, ystage, k3);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (detail::kA41 * k1[i] + detail::kA42 * k2[i] + detail::kA43 * k3[i]);
    rhs(t + detail::kC4 * h, ystage, k4);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (detail::kA51 * k1[i] + detail::kA52 * k2[i] + detail::kA53 * k3[i] +
                              detail::kA54 * k4[i]);
    rhs(t + detail::kC5 * h, ystage, k5);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (detail::kA61 * k1[i] + detail::kA62 * k2[i] + detail::kA63 * k3[i] +
                              detail::kA64 * k4[i] + detail::kA65 * k5[i]);
    rhs(t + h, ystage, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (detail::kA71 * k1[i] + detail::kA73 * k3[i] + detail::kA74 * k4[i] +
                            detail::kA75 * k5[i] + detail::kA76 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (detail::kE1 * k1[i] + detail::kE3 * k3[i] + detail::kE4 * k4[i] +
                            detail::kE5 * k5[i] + detail::kE6 * k6[i] + detail::kE7 * k7[i]);
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
      if (!std::isfinite(ynew[i])) finite = false;
    }
    err = std::sqrt(err / n);

    if (!finite || err > 1.0) {
      ++out.steps_rejected;
      const double fac = finite ? std::max(kMinFac, kSafety * std::pow(err, -0.2)) : kMinFac;
      h *= fac;
      max_fac = 1.0;  // no growth right after a rejection
      if (h < h_min) fail(Errc::step_size_underflow, "step size underflow at t=" + std::to_string(t));
      continue;
    }

    ++out.steps_accepted;

    // Dense output for this step.
    detail::DenseSegment seg;
    seg.t0 = t;
    seg.h = h;
    seg.r1.resize(n);
    seg.r2.resize(n);
    seg.r3.resize(n);
    seg.r4.resize(n);
    seg.r5.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.r1[i] = y[i];
      seg.r2[i] = ydiff;
      seg.r3[i] = bspl;
      seg.r4[i] = ydiff - h * k7[i] - bspl;
      seg.r5[i] = h * (detail::kD1 * k1[i] + detail::kD3 * k3[i] + detail::kD4 * k4[i] +
                       detail::kD5 * k5[i] + detail::kD6 * k6[i] + detail::kD7 * k7[i]);
    }

    // Event detection over [t, t+h].
    double t_stop = t + h;
    bool stop_here = false;
    std::size_t stop_event = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      ev_curr[i] = events[i].fn(t + h, ynew);
      const double g0 = ev_prev[i], g1 = ev_curr[i];
      const bool falling = g0 > 0 && g1 <= 0;
      const bool rising = g0 < 0 && g1 >= 0;
      bool crossed = false;
      switch (events[i].direction) {
        case EventDirection::any: crossed = falling || rising; break;
        case EventDirection::falling: crossed = falling; break;
        case EventDirection::rising: crossed = rising; break;
      }
      if (!crossed) continue;
      // Locate the crossing on the dense output.
      double lo = 0, hi = 1.0, glo = g0;
      std::vector<double> ymid(n);
      while (h * (hi - lo) > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        seg.eval(mid, ymid);
        const double gm = events[i].fn(t + mid * h, ymid);
        if ((glo > 0 && gm > 0) || (glo < 0 && gm < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double theta = 0.5 * (lo + hi);
      EventHit hit;
      hit.index = i;
      hit.t = t + theta * h;
      hit.y.resize(n);
      seg.eval(theta, hit.y);
      if (events[i].terminal && hit.t < t_stop) {
        t_stop = hit.t;
        stop_here = true;
        stop_event = out.events.size();
      }
      out.events.push_back(std::move(hit));
    }

    // Emit requested samples inside (t, t_stop].
    std::vector<double> ysample(n);
    while (next_eval < t_eval.size() && t_eval[next_eval] <= t_stop + 1e-300) {
      const double ts = t_eval[next_eval];
      if (ts > t_stop) break;
      const double theta = (ts - t) / h;
      seg.eval(std::clamp(theta, 0.0, 1.0), ysample);
      out.t.push_back(ts);
      out.y.emplace_back(ysample);
      ++next_eval;
    }

    if (stop_here) {
      out.event_terminated = true;
      out.t_end = out.events[stop_event].t;
      out.y_end = out.events[stop_event].y;
      return out;
    }

    t += h;
    y.swap(ynew);
    k1.swap(k7);  // first-same-as-last
    ev_prev.swap(ev_curr);

    if (last_step || t >= t1) {
      done = true;
    } else {
      const double fac =
          std::clamp(kSafety * std::pow(std::max(err, 1e-30), -0.2), kMinFac, max_fac);
      h = std::min(h * fac, t1 - t);
      max_fac = kMaxFac;
    }
  }

  out.t_end = t;
  out.y_end = y;
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

enum class SingularEnds { none, left, right, both };

struct QuadResult {
  double value = 0;
  double error_estimate = 0;
  int subdivisions = 0;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss nodes and weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                  0.417959183673469};

struct Panel {
  double a, b;
  double value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), half = 0.5 * (b - a);
  double fv[15];
  // center
  const double fc = f(c);
  double resk = kWgk[7] * fc, resg = kWg[3] * fc, resabs = kWgk[7] * std::abs(fc);
  fv[14] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);  // Gauss nodes sit at odd Kronrod slots
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  resasc *= half;
  resabs *= half;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  return Panel{a, b, resk * half, err};
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance tol. Endpoints flagged
// singular get a geometric pre-split toward them (the Kronrod nodes are
// interior, so the endpoint itself is never evaluated); only integrable
// blow-ups are supported.
inline QuadResult quad_adaptive(const std::function<double(double)>& f, double a, double b,
                                double tol, SingularEnds ends = SingularEnds::none,
                                int max_subdiv = 10000) {
  if (!(b > a)) {
    if (a == b) return {0.0, 0.0, 0};
    fail(Errc::invalid_config, "quad_adaptive requires a <= b");
  }
  const bool sing_left = ends == SingularEnds::left || ends == SingularEnds::both;
  const bool sing_right = ends == SingularEnds::right || ends == SingularEnds::both;

  std::vector<std::pair<double, double>> seed;
  double lo = a, hi = b;
  const double len = b - a;
  if (sing_left && sing_right) {
    lo = a + 0.25 * len;
    hi = b - 0.25 * len;
  } else if (sing_left) {
    lo = a + 0.5 * len;
  } else if (sing_right) {
    hi = b - 0.5 * len;
  }
  // The innermost pre-split panel stays wide enough that the Kronrod nodes
  // remain representable strictly inside it; the adaptive loop can still
  // subdivide further where the integrand warrants it.
  const double w_floor = 1e-13 * len;
  if (sing_left) {
    double w = lo - a;
    while (w > w_floor) {
      seed.emplace_back(a + 0.5 * w, a + w);
      w *= 0.5;
    }
    seed.emplace_back(a, a + w);
  }
  seed.emplace_back(lo, hi);
  if (sing_right) {
    double w = b - hi;
    while (w > w_floor) {
      seed.emplace_back(b - w, b - 0.5 * w);
      w *= 0.5;
    }
    seed.emplace_back(b - w, b);
  }

  std::priority_queue<detail::Panel> q;
  double total = 0, total_err = 0;
  int n_panels = 0;
  for (auto [pa, pb] : seed) {
    auto p = detail::gk15(f, pa, pb);
    total += p.value;
    total_err += p.error;
    q.push(p);
    ++n_panels;
  }

  while (total_err > tol && !q.empty()) {
    if (n_panels >= max_subdiv)
      fail(Errc::quad_non_convergence,
           "quadrature error " + std::to_string(total_err) + " above tol after " +
               std::to_string(n_panels) + " panels");
    auto worst = q.top();
    q.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) continue;  // cannot split further in doubles
    auto p1 = detail::gk15(f, worst.a, mid);
    auto p2 = detail::gk15(f, mid, worst.b);
    total += p1.value + p2.value - worst.value;
    total_err += p1.error + p2.error - worst.error;
    q.push(p1);
    q.push(p2);
    ++n_panels;
  }

  return {total, total_err, n_panels};
}

// ---------------------------------------------------------------------------
// Bracketed bisection on a monotone boolean predicate
// ---------------------------------------------------------------------------

struct Bracket {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
};

// Shrinks [lo, hi] with predicate(lo) == false and predicate(hi) == true down
// to width tol. The endpoint values are re-checked up front; a violated
// precondition is reported rather than silently bisected.
inline Bracket bisect_monotone(const std::function<bool(double)>& predicate, double lo, double hi,
                               double tol) {
  if (!(lo < hi) || !(tol > 0)) fail(Errc::invalid_config, "bisect_monotone: bad interval or tol");
  if (predicate(lo)) fail(Errc::bad_bracket, "predicate already true at lo=" + std::to_string(lo));
  if (!predicate(hi)) fail(Errc::bad_bracket, "predicate still false at hi=" + std::to_string(hi));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // resolution limit
    if (predicate(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Monotone cubic (Fritsch-Carlson) interpolation
// ---------------------------------------------------------------------------

class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) fail(Errc::invalid_config, "MonotoneCubic needs >= 2 nodes");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) fail(Errc::invalid_config, "MonotoneCubic nodes must increase");
    d_.resize(n);
    std::vector<double> hseg(n - 1), sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      hseg[i] = x_[i + 1] - x_[i];
      sec[i] = (y_[i + 1] - y_[i]) / hseg[i];
    }
    d_[0] = sec[0];
    d_[n - 1] = sec[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (sec[i - 1] * sec[i] <= 0) {
        d_[i] = 0;
      } else {
        const double w1 = 2 * hseg[i] + hseg[i - 1];
        const double w2 = hseg[i] + 2 * hseg[i - 1];
        d_[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
      }
    }
  }

  double operator()(double xq) const {
    if (xq <= x_.front()) return y_.front() + d_.front() * (xq - x_.front());
    if (xq >= x_.back()) return y_.back() + d_.back() * (xq - x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double hh = x_[i + 1] - x_[i];
    const double tt = (xq - x_[i]) / hh;
    const double t2 = tt * tt, t3 = t2 * tt;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tt;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * hh * d_[i] + h01 * y_[i + 1] + h11 * hh * d_[i + 1];
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace degenwave
