#pragma once

#include <stdexcept>
#include <string>

namespace igw {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: shapes, hyperparameters, data files.
class ValidationError : public Error {
public:
    using Error::Error;
};

class AsymmetricInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidShape : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonSPDScale : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonSPDPrecision : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidHyperparameter : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DivergentIntegral : public Error {
public:
    using Error::Error;
};

class ImproperMessage : public Error {
public:
    using Error::Error;
};

class MissingMessage : public Error {
public:
    using Error::Error;
};

class NotConverged : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class IOError : public Error {
public:
    using Error::Error;
};

}  // namespace igw
