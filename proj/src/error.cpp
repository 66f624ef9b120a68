#include "parvar/error.hpp"

namespace parvar {

std::string_view error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::RingMismatch: return "RingMismatch";
    case ErrorCode::ResourceExhausted: return "ResourceExhausted";
    case ErrorCode::InvalidBlock: return "InvalidBlock";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorCode::NonPolynomialModel: return "NonPolynomialModel";
    case ErrorCode::InternalError: return "InternalError";
    case ErrorCode::MultipleIOEquations: return "MultipleIOEquations";
    case ErrorCode::NoParameterDependence: return "NoParameterDependence";
    case ErrorCode::InputOnlyRelation: return "InputOnlyRelation";
    case ErrorCode::JetOrderMismatch: return "JetOrderMismatch";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::DegenerateEigenvalues: return "DegenerateEigenvalues";
    case ErrorCode::MissingLeading: return "MissingLeading";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

int exit_status(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UndeclaredSymbol:
    case ErrorCode::NonPolynomialModel:
    case ErrorCode::MultipleIOEquations:
    case ErrorCode::NoParameterDependence:
    case ErrorCode::InputOnlyRelation:
    case ErrorCode::MissingLeading:
    case ErrorCode::Usage:
    case ErrorCode::Io:
        return 2;
    case ErrorCode::JetOrderMismatch:
    case ErrorCode::IllConditioned:
    case ErrorCode::InsufficientData:
    case ErrorCode::BlowUp:
    case ErrorCode::DegenerateEigenvalues:
        return 3;
    case ErrorCode::ResourceExhausted:
        return 4;
    case ErrorCode::DivisionByZero:
    case ErrorCode::UnknownVariable:
    case ErrorCode::ZeroPolynomial:
    case ErrorCode::RingMismatch:
    case ErrorCode::InvalidBlock:
    case ErrorCode::InternalError:
        return 5;
    }
    return 5;
}

} // namespace parvar
