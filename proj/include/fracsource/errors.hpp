#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracsource {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Arguments outside the documented domain of an operation (rejected, never clamped).
class InputDomainError : public Error {
public:
    using Error::Error;
};

/// An internal numerical scheme failed to reach its tolerance. Carries the
/// regime that failed so callers can report where the evaluation broke down.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& regime, const std::string& msg)
        : Error("evaluation failed in regime '" + regime + "': " + msg), regime_(regime) {}
    const std::string& regime() const { return regime_; }

private:
    std::string regime_;
};

/// A structurally valid request that this build does not support.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Coefficient field fails ellipticity (a_dd or lateral matrix not bounded below).
class EllipticityError : public Error {
public:
    using Error::Error;
};

/// Generic numerical failure (eigensolver breakdown, singular panel, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A stated precondition of an operation does not hold for the given data
/// (e.g. the source profile face floor, coefficient evenness, lifting
/// compatibility). The message names the violated condition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Measured data that cannot come from the modeled problem (e.g. nonzero trace at t=0).
class IncompatibleDataError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration failed to converge; carries the residual history.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

/// Configuration file problem, with a line (1-based, 0 if unknown) and field name.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0, const std::string& field = "")
        : Error(format(msg, line, field)), line_(line), field_(field) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    static std::string format(const std::string& msg, int line, const std::string& field) {
        std::string out = "config error";
        if (line > 0) out += " at line " + std::to_string(line);
        if (!field.empty()) out += " (field '" + field + "')";
        return out + ": " + msg;
    }
    int line_;
    std::string field_;
};

/// Filesystem / stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fracsource
