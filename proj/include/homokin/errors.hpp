#pragma once

#include <stdexcept>
#include <string>

namespace homokin {

// Base of all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input: rejected before any numerics ran. CLI exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

// A numeric routine could not deliver its contract. CLI exit code 2 when all tasks fail.
struct NumericError : Error {
  using Error::Error;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// Fixed step exceeds the linear stability bound of the integrator.
struct StepSizeError : ValidationError {
  using ValidationError::ValidationError;
};

// Panel refinement did not stabilize (non-integrable blow-up or pathological integrand).
struct QuadratureError : NumericError {
  using NumericError::NumericError;
};

// Energy inside the critical band around sup u, where periods and weights diverge.
struct CriticalEnergyError : NumericError {
  using NumericError::NumericError;
};

// Singular-weight average requested below every potential value: empty sub-level set.
struct NoRunningRegion : NumericError {
  using NumericError::NumericError;
};

// No bracketing potential well around the requested anchor at the requested energy.
struct WellNotFound : NumericError {
  using NumericError::NumericError;
};

// Energy at or below sup u where the momentum-level inversion is undefined.
struct EnergyBelowCritical : NumericError {
  using NumericError::NumericError;
};

// Derivative of the effective Hamiltonian requested at the kink |p| = theta(0).
struct KinkError : NumericError {
  using NumericError::NumericError;
};

// Closed-form projection not defined at the requested state (critical shell, no table).
struct ProjectionUnavailable : NumericError {
  using NumericError::NumericError;
};

// Per-axis periods admit a nonzero integer relation; product projection invalid.
struct ResonantState : NumericError {
  using NumericError::NumericError;
};

}  // namespace homokin
