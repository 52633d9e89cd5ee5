#pragma once

#include <stdexcept>
#include <string>

namespace cvqe {

/// Input rejected before any computation ran. `code()` is a stable
/// machine-readable tag such as "self_loop" or "disconnected".
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Failure during computation (size limits, non-convergence that the caller
/// asked to be fatal, norm drift, I/O).
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvqe
