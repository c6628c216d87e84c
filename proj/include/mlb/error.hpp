#pragma once

#include <stdexcept>
#include <string>

namespace mlb {

// Base class for every error thrown by this library.  Catch sites that only
// care about "something in mlb went wrong" can catch this one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- shape / input validation -------------------------------------------

struct ShapeMismatch : Error {
    using Error::Error;
};

struct BadShape : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

// --- integration --------------------------------------------------------

// A solver stage produced NaN/Inf; message carries the offending time.
struct NonFiniteState : Error {
    using Error::Error;
};

struct MaxStepsExceeded : Error {
    using Error::Error;
};

// Adaptive step size fell below 1e-14 * span.
struct StepUnderflow : Error {
    using Error::Error;
};

// dense_eval called with a time outside the recorded step.
struct OutOfStepRange : Error {
    using Error::Error;
};

// --- equilibrium search --------------------------------------------------

// No sign change of f(V) - i_ext in the requested bracket.
struct EmptyBracket : Error {
    using Error::Error;
};

// --- autodiff ------------------------------------------------------------

struct DivisionByZero : Error {
    using Error::Error;
};

struct NoOutput : Error {
    using Error::Error;
};

struct NonScalarOutput : Error {
    using Error::Error;
};

// seed_input_tangent on a node that is not an input of the tape.
struct UnknownInput : Error {
    using Error::Error;
};

// --- training ------------------------------------------------------------

// Loss became NaN/Inf; message carries the epoch index.
struct NonFiniteLoss : Error {
    using Error::Error;
};

// --- normalization -------------------------------------------------------

// Min-max scaling over a channel whose range is below 1e-12.
struct DegenerateChannel : Error {
    using Error::Error;
};

} // namespace mlb
