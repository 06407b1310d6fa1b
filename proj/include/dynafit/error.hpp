#pragma once

#include <stdexcept>
#include <string>

namespace dynafit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory shapes that cannot be combined (different n or N, empty sets).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain a kernel or generator accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite kernel values, indefinite Gram matrices, distances far below zero.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Invalid argument to an operation (thresholds, fractions, counts).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dataset ingestion failures: missing files, unparsable cells, bad manifests.
class DataError : public Error {
public:
    using Error::Error;
};

/// Model file does not parse.
class FormatError : public Error {
public:
    using Error::Error;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace dynafit
