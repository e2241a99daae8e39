#include "bent/error.hpp"

namespace bent {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NegativeCoefficient:
            return "NegativeCoefficient";
        case ErrorCode::NotNormalized:
            return "NotNormalized";
        case ErrorCode::DimensionShrink:
            return "DimensionShrink";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::DimensionTooLarge:
            return "DimensionTooLarge";
        case ErrorCode::BadProbabilities:
            return "BadProbabilities";
        case ErrorCode::NotOptimalProtocol:
            return "NotOptimalProtocol";
        case ErrorCode::UnsupportedClosedForm:
            return "UnsupportedClosedForm";
        case ErrorCode::UnsupportedDim:
            return "UnsupportedDim";
        case ErrorCode::UnknownFamily:
            return "UnknownFamily";
        case ErrorCode::UnknownMeasure:
            return "UnknownMeasure";
        case ErrorCode::EmptySubset:
            return "EmptySubset";
        case ErrorCode::InconsistentTable:
            return "InconsistentTable";
        case ErrorCode::VariableMismatch:
            return "VariableMismatch";
        case ErrorCode::DegreeTooSmall:
            return "DegreeTooSmall";
        case ErrorCode::ProblemTooLarge:
            return "ProblemTooLarge";
        case ErrorCode::SolverDidNotConverge:
            return "SolverDidNotConverge";
        case ErrorCode::NumericalBreakdown:
            return "NumericalBreakdown";
        case ErrorCode::ParseError:
            return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {
}

}  // namespace bent
