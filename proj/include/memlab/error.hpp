#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memlab {

/// Failure categories raised across the library.
enum class ErrorCode {
    InvalidParameter,
    InvalidDomain,
    InvalidKernel,
    InvalidInitialData,
    InvalidConfig,
    NoCompatibleData,
    NegativeState,
    StepRejected,
    Blowup,
    TimeTooSmall,
    KernelEvalFailed,
    NoContraction,
    NoSupersolution,
    RegimeMismatch,
    SearchFailed,
    WindowEmpty,
    HypothesisUnmet,
    MonotonicityViolated,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message)
        , code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace memlab
