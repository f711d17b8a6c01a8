#pragma once

#include <stdexcept>
#include <string>

namespace spatialqt {

// Base class for every failure raised by the library. The CLI maps these to
// a nonzero exit code with the message as diagnostic.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input value; the message names the offending field.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A detector-slit plan whose effective transform is singular.
class PlanningError : public Error {
public:
    using Error::Error;
};

/// The inversion for some off-diagonal element has a (near) zero determinant.
class IllConditionedPlanError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InconsistentInputError : public Error {
public:
    using Error::Error;
};

/// The pump amplitude vanishes at every slit-pair midpoint.
class DegeneratePumpError : public Error {
public:
    using Error::Error;
};

}  // namespace spatialqt
