#pragma once

#include <stdexcept>
#include <string>

namespace gridfluct {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input violates a modelling assumption or a documented precondition.
/// The CLI reports these with exit code 2; every other Error maps to 1.
class AssumptionError : public Error {
public:
    using Error::Error;
};

class InvalidSizeError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class InvalidGraphError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class ConnectivityError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class NoSynchronousStateError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class InsecureStateError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class NoEquilibriumError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class InstabilityError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class AssumptionViolatedError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class PreconditionError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class ValidationError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

class ParseError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

/// Matrix dimensions or structure do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo integration diverged; the step size is too large.
class StepSizeError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace gridfluct
