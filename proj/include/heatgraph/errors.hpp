#pragma once

#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace heatgraph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (shapes, ranges, matrix structure).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Graph with no edges where a positive volume is required.
class DegenerateGraphError : public Error {
public:
    using Error::Error;
};

/// An iterative method did not reach its tolerance.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string &what, double residual)
        : Error(format(what, residual)), residual_(residual) {}

    double residual() const { return residual_; }

private:
    static std::string format(const std::string &what, double residual) {
        std::ostringstream os;
        os << what << " (residual " << std::setprecision(3) << residual << ")";
        return os.str();
    }

    double residual_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace heatgraph
