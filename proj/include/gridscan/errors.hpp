#pragma once

#include <stdexcept>
#include <string>

namespace gridscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter object violates its invariants (non-positive amplitude, bad order, ...).
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// Two inputs that must agree in length or sample period do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A network configuration produced an unusable state-space model.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A least-squares system has fewer effective equations than unknowns.
class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

/// A regression matrix lost rank where the caller needs a unique solution.
class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// Configuration or data file problems surfaced by the I/O layer.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A required input file or dataset is absent.
class MissingInputError : public Error {
public:
    using Error::Error;
};

/// Data exist but cannot be combined (grid mismatch, method/data conflict).
class IncompatibleDataError : public Error {
public:
    using Error::Error;
};

}  // namespace gridscan
