#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parvar {

enum class ErrorCode {
    // algebra_core
    DivisionByZero,
    UnknownVariable,
    ZeroPolynomial,
    RingMismatch,
    // groebner
    ResourceExhausted,
    InvalidBlock,
    // model_ir
    SyntaxError,
    UndeclaredSymbol,
    NonPolynomialModel,
    // io_equation
    InternalError,
    MultipleIOEquations,
    NoParameterDependence,
    InputOnlyRelation,
    // variety_estimator / data_lab
    JetOrderMismatch,
    IllConditioned,
    InsufficientData,
    BlowUp,
    DegenerateEigenvalues,
    // extension_checker
    MissingLeading,
    // cli / io
    Usage,
    Io,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Exit status for the command-line front end:
/// 0 success, 2 usage/parse, 3 numeric, 4 algebra resource cap, 5 internal invariant.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace parvar
