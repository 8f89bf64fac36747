#ifndef TDPI_ERRORS_HPP
#define TDPI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdpi {

// Base class for all numerical failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A quadrature failed to reach its target accuracy; carries the estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double achieved)
        : Error(msg + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

// An iteration (Picard, continued fraction, truncation doubling, root find)
// stopped without meeting its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double last_increment = 0.0)
        : Error(msg), increment(last_increment) {}
    double increment;
};

// A sampled series does not match the grid an operation requires.
class GridError : public Error {
public:
    explicit GridError(const std::string& msg) : Error(msg) {}
};

// Driving frequency resonant with the bound-state energy; spectral
// machinery refuses to run.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& msg, long n) : Error(msg), divisor(n) {}
    long divisor;
};

// A requested accuracy cannot be certified (tail bounds too large etc.).
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& msg, double estimate)
        : Error(msg), error_estimate(estimate) {}
    double error_estimate;
};

} // namespace tdpi

#endif
