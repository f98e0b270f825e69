#pragma once

#include <stdexcept>
#include <string>

namespace spintf {

/// Failure codes surfaced by the library. `usage`-class codes indicate a
/// violated precondition (bad input); the rest indicate numerical trouble.
enum class Errc {
  non_positive_mass,
  invalid_coupling,
  magnetization_exceeds_mass,
  wrong_sign,
  regime_mismatch,
  root_not_found,
  degenerate_regime,
  no_convergence,
  stall_detected,
  projection_infeasible,
  geometry_too_tight,
  jacobian_singular,
  well_violation,
  zero_tension,
  no_contact,
  invalid_argument,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::non_positive_mass: return "NonPositiveMass";
    case Errc::invalid_coupling: return "InvalidCoupling";
    case Errc::magnetization_exceeds_mass: return "MagnetizationExceedsMass";
    case Errc::wrong_sign: return "WrongSign";
    case Errc::regime_mismatch: return "RegimeMismatch";
    case Errc::root_not_found: return "RootNotFound";
    case Errc::degenerate_regime: return "DegenerateRegime";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::stall_detected: return "StallDetected";
    case Errc::projection_infeasible: return "ProjectionInfeasible";
    case Errc::geometry_too_tight: return "GeometryTooTight";
    case Errc::jacobian_singular: return "JacobianSingular";
    case Errc::well_violation: return "WellViolation";
    case Errc::zero_tension: return "ZeroTension";
    case Errc::no_contact: return "NoContact";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

  /// True when the error reflects bad input rather than a numerical failure.
  bool is_usage() const {
    switch (code_) {
      case Errc::non_positive_mass:
      case Errc::invalid_coupling:
      case Errc::magnetization_exceeds_mass:
      case Errc::wrong_sign:
      case Errc::regime_mismatch:
      case Errc::zero_tension:
      case Errc::invalid_argument:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

}  // namespace spintf
