#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinchain {

enum class ErrorKind {
    DimensionError,
    NormError,
    ParamError,
    DomainError,
    ConvergenceError,
    BranchError,
    QuadratureError,
    SingularPoint,
    ConsistencyError,
    ContourError,
    StepError,
    KindError,
    ConfigError,
    UnknownAxis,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view kind_name() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

// Iteration cap reached; carries the partial result so callers may decide.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, double partial_re, double partial_im, double est_error)
        : Error(ErrorKind::ConvergenceError, message),
          partial_re_(partial_re), partial_im_(partial_im), est_error_(est_error) {}

    double partial_real() const noexcept { return partial_re_; }
    double partial_imag() const noexcept { return partial_im_; }
    double est_error() const noexcept { return est_error_; }

private:
    double partial_re_;
    double partial_im_;
    double est_error_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace spinchain
