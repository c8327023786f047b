#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsci {

enum class ErrorCode {
    // model / ingestion
    UnknownWeightKey,
    MissingWeightSeries,
    DuplicateIndicatorId,
    DuplicateCountry,
    UnknownDirection,
    UnknownTheme,
    UnknownRegion,
    UnknownIncomeGroup,
    MalformedCsv,
    UnparseableValue,
    YearOutOfRange,
    MalformedRow,
    DuplicateCell,
    UnknownIndicator,
    UnknownCountry,
    NetworkError,
    HttpStatusError,
    CacheWriteError,
    // baseline
    InvalidWindow,
    // statkernels
    ZeroTotalWeight,
    LengthMismatch,
    NeedTwoPoints,
    EmptyInput,
    ProbOutOfRange,
    EmptyGroup,
    ZeroGroupWeight,
    DegenerateDof,
    InvalidDof,
    TooFewPoints,
    InvalidSpan,
    ZeroRange,
    NegativeComponent,
    NeedThreePoints,
    // derived
    NonpositiveGDP,
    EmptySeries,
    InvalidSeries,
    NonpositiveUrbanPop,
    // analysis
    ZeroGlobalMean,
    EmptySubset,
    // cli_report
    InvalidConfig,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by fetch_source for non-2xx responses; carries the status code.
class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& url)
        : Error(ErrorCode::HttpStatusError, "HTTP " + std::to_string(status) + " for " + url),
          status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

} // namespace fsci
