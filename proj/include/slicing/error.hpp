#pragma once

#include <stdexcept>
#include <string>

namespace slicing {

/// Malformed or out-of-range input (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

/// A controller operation was called in a state where it makes no sense,
/// e.g. releasing a slice type with no active slices.
class ProtocolViolation : public std::logic_error {
public:
	using std::logic_error::logic_error;
};

/// Numerical procedure failed: divergent queue, truncation or quadrature
/// did not converge (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Workload rate rho >= 1 without impatience: the queue has no steady state.
class DivergentQueue : public NumericError {
public:
	using NumericError::NumericError;
};

/// Some slice type costs nothing, so the feasibility region is infinite.
class UnboundedRegion : public InvalidInput {
public:
	using InvalidInput::InvalidInput;
};

} // namespace slicing
