#pragma once

#include <stdexcept>
#include <string>

namespace cogarq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model object was built from invalid data (non-stochastic rows, periodic chain, ...).
class ConstructionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The received feedback has zero likelihood under the current belief.
class DegenerateObservationError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// A structural property that the theory guarantees did not hold.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Policy handle used out of order (uninitialized, or observation/action mismatch).
class StateError : public Error {
public:
    using Error::Error;
};

} // namespace cogarq
