#ifndef FRACOND_COMMON_HPP
#define FRACOND_COMMON_HPP

#include <stdexcept>
#include <string>

namespace fracond {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user-facing parameter (dim, L, N, s, radius, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

/// Two objects built on different grids were combined.
struct GridMismatch : Error {
    using Error::Error;
};

/// Region geometry violates a precondition (overlap, empty mask, missing gap).
struct GeometryError : Error {
    using Error::Error;
};

struct SolverError : Error {
    using Error::Error;
};

/// Interior block of a form turned out not SPD (detected by factorization).
struct IndefiniteFormError : SolverError {
    using SolverError::SolverError;
};

struct IoError : Error {
    using Error::Error;
};

/// When true, all pair-sum reductions run in a fixed serial order so that
/// repeated runs are bit-identical. Parallel reductions may differ in the
/// last few ulps between runs.
void set_deterministic(bool on);
bool deterministic();

} // namespace fracond

#endif
