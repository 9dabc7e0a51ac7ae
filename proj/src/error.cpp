#include "infodelta/error.hpp"

namespace infodelta {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::ZeroMeanSeries: return "ZeroMeanSeries";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
        case ErrorCode::AlreadyWeekly: return "AlreadyWeekly";
        case ErrorCode::ZeroMaxSeries: return "ZeroMaxSeries";
        case ErrorCode::InvalidSeries: return "InvalidSeries";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::InvalidPeriod: return "InvalidPeriod";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::TimestampMismatch: return "TimestampMismatch";
        case ErrorCode::CountExceedsLength: return "CountExceedsLength";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::EmptyJoin: return "EmptyJoin";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
        case ErrorCode::NegativeValue: return "NegativeValue";
        case ErrorCode::UnknownRole: return "UnknownRole";
        case ErrorCode::UnknownSeries: return "UnknownSeries";
        case ErrorCode::ResolutionPairUnsupported: return "ResolutionPairUnsupported";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

}  // namespace infodelta
