#pragma once

#include <stdexcept>
#include <string>

namespace genbench {

/// Base of every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, unknown ids. CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Something failed while doing work: I/O, a child process, the network. CLI exit code 2.
class RuntimeFailure : public Error {
public:
    using Error::Error;
};

class InvalidInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientSamples : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotPsdError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownMetric : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CoverageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RunFailed : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

class IncompleteRun : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

class IoError : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

}  // namespace genbench
