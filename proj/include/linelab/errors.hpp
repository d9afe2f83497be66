#pragma once

#include <stdexcept>
#include <string>

namespace linelab {

/// Base class for all linelab errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on input data was violated (non-unit direction, mismatched
/// base lines, unknown family name, bad parameters, ...).
struct InvalidInputError : Error {
    using Error::Error;
};

/// A (udot, vdot) pair does not describe a curve staying in TS^2.
struct InvalidTangentError : Error {
    using Error::Error;
};

/// Requested chart evaluation inside the excluded polar cap.
struct ChartDomainError : Error {
    using Error::Error;
};

/// Surface fails the immersion bound at the requested point.
struct DegenerateSurfaceError : Error {
    using Error::Error;
};

/// First fundamental form too ill-conditioned to invert.
struct ChartDegenerateError : Error {
    using Error::Error;
};

/// Congruence tangent plane degenerate (dX1, dX2 dependent).
struct DegenerateCongruenceError : Error {
    using Error::Error;
};

/// Maslov loop passes through (or too close to) a complex point.
struct ComplexPointOnLoopError : Error {
    using Error::Error;
};

/// Loop sampling could not resolve the winding (phase jumps too large).
struct ResolutionError : Error {
    using Error::Error;
};

/// Induced metric on the section is degenerate; G-gradient undefined.
struct CannotInvertGError : Error {
    using Error::Error;
};

/// Disc boundary data does not lie on a totally real part of the section.
struct InvalidBoundaryError : Error {
    using Error::Error;
};

/// Linear solver failed (harmonic extension, Newton inversion, ...).
struct SolverError : Error {
    using Error::Error;
};

/// Flow hit a non-spacelike node, a NaN, or a dt underflow.
struct FlowBreakdownError : Error {
    using Error::Error;
};

/// Run configuration malformed; maps to process exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace linelab
