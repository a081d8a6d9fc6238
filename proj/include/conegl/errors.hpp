#pragma once

#include <stdexcept>
#include <string>

namespace conegl {

// Base class for failures of numerical procedures (as opposed to invalid
// inputs, which raise std::invalid_argument / std::domain_error).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularAtOrigin : NumericalError {
  using NumericalError::NumericalError;
};

// A winding integral could not be evaluated: a node modulus fell below the
// threshold or a single phase step reached pi.
struct DegreeUndefined : NumericalError {
  using NumericalError::NumericalError;
};

// The unwrapped winding did not round cleanly to an integer.
struct NonIntegerWinding : NumericalError {
  using NumericalError::NumericalError;
};

struct NanDivergence : NumericalError {
  using NumericalError::NumericalError;
};

struct NotConverged : NumericalError {
  using NumericalError::NumericalError;
};

struct InconsistentDegrees : NumericalError {
  using NumericalError::NumericalError;
};

struct UnresolvedCore : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateDesign : NumericalError {
  using NumericalError::NumericalError;
};

struct CoincidentVortices : NumericalError {
  using NumericalError::NumericalError;
};

struct NoInteriorMinimum : NumericalError {
  using NumericalError::NumericalError;
};

struct OverlappingExcisions : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularEvaluation : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace conegl
