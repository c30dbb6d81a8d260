#pragma once

#include <stdexcept>
#include <string>

namespace degenwave {

// Error taxonomy shared by all modules. Every throwing path uses Error with
// one of these codes so callers (and the CLI exit-code mapping) can dispatch
// without string matching.
enum class Errc {
  invalid_config,
  // model construction / audit
  degenerate_corner_derivative,
  unbounded_corner_derivative,
  non_positive_estimate,
  not_audited,
  // integration kernels
  step_size_underflow,
  max_steps_exceeded,
  quad_non_convergence,
  bad_bracket,
  // speed bounds
  unbounded_ratio,
  unsupported_gamma,
  // shooting
  singular_launch,
  inconclusive,
  not_admissible,
  // pde simulation
  cfl_violation,
  non_finite_state,
  front_lost,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::degenerate_corner_derivative: return "DegenerateCornerDerivative";
    case Errc::unbounded_corner_derivative: return "UnboundedCornerDerivative";
    case Errc::non_positive_estimate: return "NonPositiveEstimate";
    case Errc::not_audited: return "NotAudited";
    case Errc::step_size_underflow: return "StepSizeUnderflow";
    case Errc::max_steps_exceeded: return "MaxStepsExceeded";
    case Errc::quad_non_convergence: return "NonConvergence";
    case Errc::bad_bracket: return "BadBracket";
    case Errc::unbounded_ratio: return "UnboundedRatio";
    case Errc::unsupported_gamma: return "UnsupportedGamma";
    case Errc::singular_launch: return "SingularLaunch";
    case Errc::inconclusive: return "Inconclusive";
    case Errc::not_admissible: return "NotAdmissible";
    case Errc::cfl_violation: return "CflViolation";
    case Errc::non_finite_state: return "NonFiniteState";
    case Errc::front_lost: return "FrontLost";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace degenwave
