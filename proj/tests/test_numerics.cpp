#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "degenwave/numerics.hpp"

using namespace degenwave;
using Catch::Approx;

TEST_CASE("exponential decay to tolerance") {
  IntegratorConfig cfg;
  const double y0[1] = {1.0};
  auto tr = integrate_ivp([](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; },
                          0.0, 1.0, std::span<const double>(y0, 1), cfg);
  REQUIRE(std::abs(tr.y_end[0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("dense output samples match the analytic solution") {
  IntegratorConfig cfg;
  const double y0[1] = {1.0};
  std::vector<double> t_eval;
  for (int i = 0; i <= 40; ++i) t_eval.push_back(i / 40.0);
  auto tr = integrate_ivp([](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; },
                          0.0, 1.0, std::span<const double>(y0, 1), cfg, {}, t_eval);
  REQUIRE(tr.t.size() == t_eval.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    REQUIRE(std::abs(tr.y[i][0] - std::exp(-tr.t[i])) < 1e-9);
}

TEST_CASE("observed convergence order matches the pair") {
  // Global error against mean step size across tolerance tightening on a
  // circular orbit; the propagated solution is 5th order. The loosest
  // tolerances are skipped: a handful of steps is not an asymptotic regime.
  const double T = 12.0;
  std::vector<double> log_h, log_e;
  for (double tol : {1e-7, 1e-8, 1e-9, 1e-10}) {
    IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol;
    const double y0[2] = {1.0, 0.0};
    auto tr = integrate_ivp(
        [](double, std::span<const double> y, std::span<double> d) {
          d[0] = y[1];
          d[1] = -y[0];
        },
        0.0, T, std::span<const double>(y0, 2), cfg);
    const double err = std::hypot(tr.y_end[0] - std::cos(T), tr.y_end[1] + std::sin(T));
    log_h.push_back(std::log(T / static_cast<double>(tr.steps_accepted)));
    log_e.push_back(std::log(err));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(log_h.size());
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sx += log_h[i];
    sy += log_e[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_e[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  REQUIRE(slope > 4.5);
  REQUIRE(slope < 5.5);
}

TEST_CASE("linear crossing event is located to 1e-12") {
  IntegratorConfig cfg;
  const double y0[1] = {0.0};
  std::vector<EventSpec> events(2);
  events[0].fn = [](double, std::span<const double> y) { return y[0] - 0.5; };
  events[0].direction = EventDirection::falling;
  events[1].fn = [](double, std::span<const double> y) { return y[0] - 0.5; };
  events[1].direction = EventDirection::rising;
  auto tr = integrate_ivp([](double, std::span<const double>, std::span<double> d) { d[0] = 1.0; },
                          0.0, 1.0, std::span<const double>(y0, 1), cfg, events);
  REQUIRE(tr.events.size() == 1);  // falling filter must not fire
  REQUIRE(tr.events[0].index == 1);
  REQUIRE(std::abs(tr.events[0].t - 0.5) < 1e-12);
}

TEST_CASE("terminal event stops the integration") {
  IntegratorConfig cfg;
  const double y0[1] = {1.0};
  std::vector<EventSpec> events(1);
  events[0].fn = [](double, std::span<const double> y) { return y[0] - 0.5; };
  events[0].direction = EventDirection::falling;
  events[0].terminal = true;
  auto tr = integrate_ivp([](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; },
                          0.0, 5.0, std::span<const double>(y0, 1), cfg, events);
  REQUIRE(tr.event_terminated);
  REQUIRE(std::abs(tr.t_end - std::log(2.0)) < 1e-10);
  REQUIRE(std::abs(tr.y_end[0] - 0.5) < 1e-10);
}

TEST_CASE("raw shooting right side survives to the stop offset") {
  // The scalar reduction for the reference model at a comfortably
  // supercritical speed, written out directly: the trajectory collapses onto
  // 1 - t near the right end, the stiffest case the shooting module creates.
  IntegratorConfig cfg;
  cfg.max_steps = 100'000'000;
  const double c = 2.5, c2 = c * c;
  const double eps = 1e-6, delta = 1e-6;
  const double y0[1] = {1.0 - eps + eps * eps / c2};
  auto tr = integrate_ivp(
      [c2](double t, std::span<const double> y, std::span<double> d) {
        d[0] = c2 * (1.0 - t - y[0]) / (t * y[0] * (t * y[0]));
      },
      eps, 1.0 - delta, std::span<const double>(y0, 1), cfg);
  REQUIRE(tr.t_end == Approx(1.0 - delta));
  REQUIRE(tr.y_end[0] > 0.0);
  REQUIRE(tr.y_end[0] < 1e-5);
}

TEST_CASE("two-body style blow-up reports step size underflow") {
  IntegratorConfig cfg;
  cfg.max_steps = 1'000'000;
  const double y0[1] = {1.0};
  REQUIRE_THROWS_MATCHES(
      integrate_ivp([](double, std::span<const double> y, std::span<double> d) {
                      d[0] = y[0] * y[0];  // finite-time blow-up before t = 2
                    },
                    0.0, 2.0, std::span<const double>(y0, 1), cfg),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == Errc::step_size_underflow || e.code() == Errc::max_steps_exceeded;
      }));
}

TEST_CASE("quadrature: smooth polynomial moments are exact") {
  auto q = quad_adaptive([](double r) { return (1 - r) * r * r; }, 0.0, 1.0, 1e-12);
  REQUIRE(std::abs(q.value - 1.0 / 12.0) < 1e-12);

  for (int k = 0; k <= 10; ++k) {
    auto qk = quad_adaptive([k](double x) { return std::pow(x, k); }, 0.0, 1.0, 1e-13);
    REQUIRE(std::abs(qk.value - 1.0 / (k + 1)) < 1e-13);
  }
}

TEST_CASE("quadrature: zero integrand") {
  auto q = quad_adaptive([](double) { return 0.0; }, 0.0, 1.0, 1e-12);
  REQUIRE(q.value == 0.0);
}

TEST_CASE("quadrature: inverse square root endpoint") {
  auto q = quad_adaptive([](double r) { return 1.0 / std::sqrt(r); }, 0.0, 1.0, 1e-10,
                         SingularEnds::left);
  REQUIRE(std::abs(q.value - 2.0) < 1e-9);
  REQUIRE(q.error_estimate >= 0.0);
}

TEST_CASE("quadrature: log singularity on both ends") {
  auto q = quad_adaptive([](double x) { return std::log(x) * std::log1p(-x); }, 0.0, 1.0, 1e-10,
                         SingularEnds::both);
  REQUIRE(std::abs(q.value - (2.0 - std::numbers::pi * std::numbers::pi / 6.0)) < 1e-8);
}

TEST_CASE("bisect_monotone shrinks a clean bracket") {
  auto br = bisect_monotone([](double c) { return c >= 1.3; }, 0.0, 2.0, 1e-6);
  REQUIRE(br.width() <= 1e-6);
  REQUIRE(br.lo < 1.3);
  REQUIRE(br.hi >= 1.3);
}

TEST_CASE("bisect_monotone endpoints evaluate to false/true") {
  int evals = 0;
  auto pred = [&evals](double c) {
    ++evals;
    return c > 0.4;
  };
  auto br = bisect_monotone(pred, 0.0, 1.0, 1e-4);
  REQUIRE_FALSE(pred(br.lo));
  REQUIRE(pred(br.hi));
}

TEST_CASE("bisect_monotone rejects a bad bracket") {
  REQUIRE_THROWS_MATCHES(bisect_monotone([](double) { return false; }, 0.0, 1.0, 1e-6), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::bad_bracket; }));
  REQUIRE_THROWS_MATCHES(bisect_monotone([](double) { return true; }, 0.0, 1.0, 1e-6), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::bad_bracket; }));
}

TEST_CASE("monotone cubic interpolates monotone data monotonically") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    x.push_back(i / 20.0);
    y.push_back(std::sqrt(1.0 - x.back() + 1e-3));
  }
  MonotoneCubic f(x, y);
  double prev = f(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double v = f(i / 400.0);
    REQUIRE(v <= prev + 1e-14);
    prev = v;
  }
  REQUIRE(f(0.5) == Approx(std::sqrt(0.501)).margin(1e-5));
}
