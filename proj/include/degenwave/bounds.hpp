#pragma once

// Computable bounds that sandwich the threshold wave speed c0:
//   c_sharp = max( sqrt(L1*Mg*I1), sqrt(2*L1*Mg*I2) )   (lower bound)
//       I1  = int_0^1 g(1-r) h(r) r dr
//       I2  = int_0^1 (1-r) g(1-r) h(r) r dr
//   c_star  = 2*sqrt(L2 * max_{[0,1]} g * sup_{(0,1]} h(r)/r)   (upper bound)
// For g(s)=s^alpha, h(r)=r (gamma = 1) both branch integrals have closed
// forms used as oracles against the quadrature route.

#include <cmath>
#include <functional>

#include "degenwave/error.hpp"
#include "degenwave/model.hpp"
#include "degenwave/numerics.hpp"

namespace degenwave {

struct CSharpBranches {
  double branch1 = 0, branch2 = 0;
  double c_sharp = 0;  // max of the branches
  double err1 = 0, err2 = 0;  // quadrature error estimates of the branch integrals
};

struct SpeedBounds {
  double c_sharp_branch1 = 0;
  double c_sharp_branch2 = 0;
  double c_sharp = 0;
  double c_star = 0;
  double branch1_error = 0;
  double branch2_error = 0;
};

namespace detail {

inline void require_audited(const ModelSpec& m, const char* op) {
  if (!m.audited)
    fail(Errc::not_audited, std::string(op) + " requires a model that passed audit_assumptions");
}

// Golden-section maximization; f is assumed unimodal near the seeded bracket.
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         int iters = 120) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-14; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

// Dense sampling plus a golden-section polish around the best sample. A pure
// grid misses suprema attained in the r -> 0 limit, so the caller feeds the
// limit value as an extra candidate.
inline double sampled_sup(const std::function<double(double)>& f, double a, double b,
                          int samples = 4096) {
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= samples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / samples;
    const double v = f(x);
    if (v > best) best = v, best_i = i;
  }
  const double hx = (b - a) / samples;
  const double lo = std::max(a, a + (b - a) * static_cast<double>(best_i) / samples - hx);
  const double hi = std::min(b, a + (b - a) * static_cast<double>(best_i) / samples + hx);
  return std::max(best, golden_max(f, lo, hi));
}

}  // namespace detail

inline CSharpBranches compute_c_sharp(const ModelSpec& m, double tol = 1e-10) {
  detail::require_audited(m, "compute_c_sharp");
  // Integrands vanish at both endpoints but their derivatives may not exist
  // there for fractional power laws; flag both ends singular.
  auto q1 = quad_adaptive([&m](double r) { return m.g(1 - r) * m.h(r) * r; }, 0.0, 1.0, tol,
                          SingularEnds::both);
  auto q2 = quad_adaptive([&m](double r) { return (1 - r) * m.g(1 - r) * m.h(r) * r; }, 0.0, 1.0,
                          tol, SingularEnds::both);
  CSharpBranches out;
  out.branch1 = std::sqrt(std::max(m.L1 * m.Mg * q1.value, 0.0));
  out.branch2 = std::sqrt(std::max(2.0 * m.L1 * m.Mg * q2.value, 0.0));
  out.c_sharp = std::max(out.branch1, out.branch2);
  out.err1 = q1.error_estimate;
  out.err2 = q2.error_estimate;
  return out;
}

inline double compute_c_star(const ModelSpec& m, double /*tol*/ = 1e-10) {
  detail::require_audited(m, "compute_c_star");
  constexpr double kRatioCap = 1e12;
  const double max_g = detail::sampled_sup([&m](double s) { return m.g(s); }, 0.0, 1.0);

  // sup over (0,1] of h(r)/r, with the r -> 0 limit h'(0) as a candidate.
  if (m.dh0_status == CornerStatus::unbounded)
    fail(Errc::unbounded_ratio, m.name + ": h(r)/r is unbounded near r=0");
  double sup_ratio =
      detail::sampled_sup([&m](double r) { return m.h(r) / r; }, 1.0 / 4096.0, 1.0);
  if (m.dh0_status == CornerStatus::finite) sup_ratio = std::max(sup_ratio, m.dh0);
  if (!(sup_ratio < kRatioCap))
    fail(Errc::unbounded_ratio, m.name + ": sampled h(r)/r exceeds 1e12");

  return 2.0 * std::sqrt(m.L2 * max_g * sup_ratio);
}

struct ClosedFormBranches {
  double branch1 = 0, branch2 = 0;
};

// Closed forms for g(s)=s^alpha, h(r)=r, Mg=1: the branch integrals reduce to
// Beta-function values 2/((a+1)(a+2)(a+3)) at a = alpha and a = alpha + 1.
// Branch 1 dominates exactly when alpha < 2.
inline ClosedFormBranches closed_form_power_law(double alpha, double gamma = 1.0,
                                                double L1 = 1.0) {
  if (gamma != 1.0) fail(Errc::unsupported_gamma, "closed forms exist only for gamma = 1");
  if (!(alpha > 0) || !(L1 > 0)) fail(Errc::invalid_config, "need alpha > 0 and L1 > 0");
  ClosedFormBranches out;
  out.branch1 = std::sqrt(2.0 * L1 / ((alpha + 1) * (alpha + 2) * (alpha + 3)));
  out.branch2 = std::sqrt(4.0 * L1 / ((alpha + 2) * (alpha + 3) * (alpha + 4)));
  return out;
}

inline SpeedBounds compute_bounds(const ModelSpec& m, double tol = 1e-10) {
  const auto br = compute_c_sharp(m, tol);
  SpeedBounds b;
  b.c_sharp_branch1 = br.branch1;
  b.c_sharp_branch2 = br.branch2;
  b.c_sharp = br.c_sharp;
  b.branch1_error = br.err1;
  b.branch2_error = br.err2;
  b.c_star = compute_c_star(m, tol);
  return b;
}

}  // namespace degenwave
