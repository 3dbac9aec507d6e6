#pragma once

#include <stdexcept>
#include <string>

namespace normext {

// Base class for every library error. Specific subtypes exist so callers
// (tests, the CLI exit-code mapping) can react to the failure kind.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside its admissible interval, e.g. t outside [0,1].
struct DomainError : Error {
    using Error::Error;
};

// Evaluation requested within the exclusion radius of a weight zero.
struct SingularityError : Error {
    using Error::Error;
};

// Mismatched grids or incompatible matrix dimensions.
struct ShapeError : Error {
    using Error::Error;
};

// Grid too coarse for the requested finite-difference stencil.
struct InsufficientResolutionError : Error {
    using Error::Error;
};

// Coefficient family violates a construction hypothesis (Hermiticity or
// commutation of the real and imaginary parts).
struct CoefficientError : Error {
    using Error::Error;
};

// A_r(t) - (alpha'/2alpha)I is not constant in t.
struct NotConstantFormError : Error {
    using Error::Error;
};

// A matrix required to be positive semidefinite has a negative eigenvalue.
struct PositivityError : Error {
    using Error::Error;
};

// An extension failed validation; the message names the failed check.
struct InvalidExtensionError : Error {
    using Error::Error;
};

// |mu| = 0 for an eigenvalue of W* e^{-C}; signals corrupt input.
struct DegenerateSpectrumError : Error {
    using Error::Error;
};

// Discretization size outside the supported budget.
struct SizeError : Error {
    using Error::Error;
};

// Empty or inconsistent enumeration window.
struct WindowError : Error {
    using Error::Error;
};

// Degenerate index range for a least-squares fit.
struct FitError : Error {
    using Error::Error;
};

// Parameter outside its admissible range (e.g. Schatten p < 1).
struct ParameterError : Error {
    using Error::Error;
};

// Resolvent requested too close to the spectrum.
struct ResolventSingularityError : Error {
    using Error::Error;
};

// Endpoint trace extrapolation failed to produce a finite value.
struct TraceError : Error {
    using Error::Error;
};

// The inverse of the extension does not exist (0 is a lattice point).
struct InverseUndefinedError : Error {
    using Error::Error;
};

// Malformed or inconsistent problem configuration.
struct ConfigError : Error {
    using Error::Error;
};

// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace normext
