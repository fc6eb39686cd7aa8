#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace steerscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A generator basis or state was requested for an unsupported dimension.
class InvalidDimension : public Error {
public:
    using Error::Error;
};

/// Inconsistent vector/matrix shapes.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Negative, non-finite or otherwise unusable parameter values.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A matrix failed one of the density-matrix invariants.
class ValidationError : public Error {
public:
    ValidationError(std::string invariant, double deviation, const std::string& what)
        : Error(what), invariant_(std::move(invariant)), deviation_(deviation) {}

    const std::string& invariant() const noexcept { return invariant_; }
    double deviation() const noexcept { return deviation_; }

private:
    std::string invariant_;
    double deviation_;
};

/// Reading or parsing an input file failed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace steerscan
