#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

// Hard quadrature failure (NaN/Inf at an interior node, or a divergent
// integral); carries the offending abscissa when known.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double abscissa)
        : std::runtime_error(msg), abscissa_(abscissa) {}
    double abscissa() const { return abscissa_; }

private:
    double abscissa_;
};

// psi^+(-xi^2) == psi(lambda^2) for some xi > 0: the spectral measure
// gamma_lambda has an atom and the absolutely-continuous formulas do not
// apply.  Carries the atom location xi.
class AtomError : public std::runtime_error {
public:
    AtomError(const std::string& msg, double location)
        : std::runtime_error(msg), location_(location) {}
    double location() const { return location_; }

private:
    double location_;
};

// An integrability condition required by a spectral formula failed; the
// message names the failing inequality.
class ConditionError : public std::runtime_error {
public:
    explicit ConditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested feature is not defined for this model (no boundary values, no
// regular-variation metadata, no sampler, ...).
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double partial)
        : std::runtime_error(msg), partial_(partial) {}
    double partial() const { return partial_; }

private:
    double partial_;
};

} // namespace halfline
