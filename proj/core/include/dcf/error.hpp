#pragma once

#include <stdexcept>
#include <string>

namespace dcf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration text or a parameter that violates its invariant.
class ConfigError : public Error {
public:
    ConfigError(std::string key, int line, const std::string& what)
        : Error(what), key_(std::move(key)), line_(line) {}

    /// Offending key, empty for pure syntax errors.
    const std::string& key() const noexcept { return key_; }
    /// 1-based line number, 0 when the error is not tied to a file line.
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

class UnsupportedModulation : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// P_eq sits exactly on the removable singularity of the closed forms.
class SingularityError : public Error {
public:
    using Error::Error;
};

class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// Numerical failure of the fixed-point solve. Carries the last residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The model left the probability simplex (for example a non-finite FER).
class InvalidRegime : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

}  // namespace dcf
