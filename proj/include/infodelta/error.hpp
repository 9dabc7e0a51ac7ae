#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infodelta {

enum class ErrorCode {
    EmptySeries,
    ZeroMeanSeries,
    NoOverlap,
    ResolutionMismatch,
    AlreadyWeekly,
    ZeroMaxSeries,
    InvalidSeries,
    WindowTooSmall,
    SeriesTooShort,
    InvalidPeriod,
    InvalidConfig,
    EmptySample,
    TimestampMismatch,
    CountExceedsLength,
    LengthMismatch,
    ZeroVariance,
    ScoreOutOfRange,
    EmptyJoin,
    MalformedRow,
    DuplicateTimestamp,
    NegativeValue,
    UnknownRole,
    UnknownSeries,
    ResolutionPairUnsupported,
    IoFailure,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; code() identifies the condition.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace infodelta
