#include "fraccite/error.hpp"

namespace fraccite {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingId: return "MissingId";
    case ErrorCode::MalformedField: return "MalformedField";
    case ErrorCode::UnterminatedRecord: return "UnterminatedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NonPositiveP: return "NonPositiveP";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownUnitInMinus: return "UnknownUnitInMinus";
    case ErrorCode::CyclicMinus: return "CyclicMinus";
    case ErrorCode::DuplicateUnit: return "DuplicateUnit";
    case ErrorCode::ZeroReferences: return "ZeroReferences";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::AllValuesTied: return "AllValuesTied";
    case ErrorCode::DegenerateGroups: return "DegenerateGroups";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::UnitSetMismatch: return "UnitSetMismatch";
    case ErrorCode::IncompletePairCoverage: return "IncompletePairCoverage";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace fraccite
