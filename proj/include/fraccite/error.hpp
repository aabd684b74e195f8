#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraccite {

enum class ErrorCode {
    MissingId,
    MalformedField,
    UnterminatedRecord,
    DuplicateId,
    NonNumericCell,
    NonPositiveP,
    SyntaxError,
    UnknownUnitInMinus,
    CyclicMinus,
    DuplicateUnit,
    ZeroReferences,
    UnknownUnit,
    ConstantInput,
    LengthMismatch,
    TooFewGroups,
    AllValuesTied,
    DegenerateGroups,
    ConvergenceFailure,
    UnitSetMismatch,
    IncompletePairCoverage,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception; `code()` identifies the
// failure class, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fraccite
