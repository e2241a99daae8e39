#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bent {

enum class ErrorCode {
    NegativeCoefficient,
    NotNormalized,
    DimensionShrink,
    DimensionMismatch,
    DimensionTooLarge,
    BadProbabilities,
    NotOptimalProtocol,
    UnsupportedClosedForm,
    UnsupportedDim,
    UnknownFamily,
    UnknownMeasure,
    EmptySubset,
    InconsistentTable,
    VariableMismatch,
    DegreeTooSmall,
    ProblemTooLarge,
    SolverDidNotConverge,
    NumericalBreakdown,
    ParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Domain error raised by every module in the toolkit.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message);

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace bent
