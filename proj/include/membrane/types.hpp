#ifndef MEMBRANE_TYPES_HPP
#define MEMBRANE_TYPES_HPP

#include <stdexcept>
#include <string>

namespace membrane {

using Scalar = double;

// Validation failures (bad user input, rejected preconditions).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failures raised while a computation is in flight.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EventNotFound : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularBlowup : NumericalError {
  using NumericalError::NumericalError;
};

struct HalfSpaceExit : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularOperator : NumericalError {
  using NumericalError::NumericalError;
};

struct ConvergenceFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateWeight : NumericalError {
  using NumericalError::NumericalError;
};

// Physical constants shared by all functionals.
//
// c_o is the spontaneous curvature, a the bending rigidity, b the
// saddle-splay modulus, alpha the flexural rigidity and beta the line
// tension of the boundary.
struct ModelParams {
  Scalar c_o = 0.0;
  Scalar a = 1.0;
  Scalar b = 0.0;
  Scalar alpha = 1.0;
  Scalar beta = 1.0;

  ModelParams() = default;
  ModelParams(Scalar c_o_, Scalar a_, Scalar b_, Scalar alpha_, Scalar beta_)
      : c_o(c_o_), a(a_), b(b_), alpha(alpha_), beta(beta_) {
    validate();
  }

  void validate() const {
    if (!(a > 0.0)) throw InvalidArgument("ModelParams: a must be positive");
    if (!(alpha > 0.0)) throw InvalidArgument("ModelParams: alpha must be positive");
    if (!(beta > 0.0)) throw InvalidArgument("ModelParams: beta must be positive");
  }
};

// Initial height of the apex of the generating curve.
struct ApexInit {
  Scalar z_hat = 1.0;

  ApexInit() = default;
  explicit ApexInit(Scalar z_hat_) : z_hat(z_hat_) {
    if (z_hat == 0.0) throw InvalidArgument("ApexInit: z_hat must be nonzero");
  }
};

enum class StopKind {
  RPrimeZero,       // geodesic boundary circle, r'(sigma_o) = 0
  PhiReachesMinusPi,  // horizontal tangent plane along the boundary circle
  ZApproachesZero,  // curve reaches the plane z = 0
  SigmaMax          // no event, run to the arc-length cap
};

struct StopRule {
  StopKind kind = StopKind::SigmaMax;
  Scalar sigma_max = 10.0;  // hard cap, always active

  StopRule() = default;
  StopRule(StopKind kind_, Scalar sigma_max_) : kind(kind_), sigma_max(sigma_max_) {
    if (!(sigma_max > 0.0)) throw InvalidArgument("StopRule: sigma_max must be positive");
  }
};

inline const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::RPrimeZero: return "rprime-zero";
    case StopKind::PhiReachesMinusPi: return "phi-pi";
    case StopKind::ZApproachesZero: return "z-zero";
    case StopKind::SigmaMax: return "sigma-max";
  }
  return "?";
}

}  // namespace membrane

#endif  // MEMBRANE_TYPES_HPP
