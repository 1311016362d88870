#include "specvar/error.hpp"

namespace specvar {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::NotDifferentiable: return "NotDifferentiable";
    case ErrorCode::NotLipschitz: return "NotLipschitz";
    case ErrorCode::NotInSet: return "NotInSet";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unconverged: return "Unconverged";
    case ErrorCode::UnknownOracle: return "UnknownOracle";
    }
    return "Unknown";
}

} // namespace specvar
