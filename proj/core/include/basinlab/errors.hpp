#pragma once

#include <stdexcept>
#include <string>

namespace basinlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pivot fell below the singularity threshold during LU factorization.
class SingularMatrix : public Error {
public:
    SingularMatrix() : Error("singular matrix") {}
    explicit SingularMatrix(const std::string& what) : Error(what) {}
};

/// A residual evaluation (typically inside a finite-difference stencil) was not finite.
class NonFiniteEvaluation : public Error {
public:
    using Error::Error;
};

/// The Arnoldi process degenerated before the residual target was met.
class Breakdown : public Error {
public:
    using Error::Error;
};

/// Thermodynamic model evaluated outside its domain (pole or overflow).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnknownSystem : public Error {
public:
    using Error::Error;
};

/// Damping factor fell below the regularity floor of a globalized Newton method.
class RegularityFailure : public Error {
public:
    using Error::Error;
};

class InsufficientTrace : public Error {
public:
    using Error::Error;
};

class AllDegenerate : public Error {
public:
    using Error::Error;
};

class EmptyCurve : public Error {
public:
    using Error::Error;
};

/// Malformed problem file, flag value, or solver configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace basinlab
