#include "fsci/error.hpp"

namespace fsci {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::UnknownWeightKey: return "UnknownWeightKey";
    case ErrorCode::MissingWeightSeries: return "MissingWeightSeries";
    case ErrorCode::DuplicateIndicatorId: return "DuplicateIndicatorId";
    case ErrorCode::DuplicateCountry: return "DuplicateCountry";
    case ErrorCode::UnknownDirection: return "UnknownDirection";
    case ErrorCode::UnknownTheme: return "UnknownTheme";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::UnknownIncomeGroup: return "UnknownIncomeGroup";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnparseableValue: return "UnparseableValue";
    case ErrorCode::YearOutOfRange: return "YearOutOfRange";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::UnknownIndicator: return "UnknownIndicator";
    case ErrorCode::UnknownCountry: return "UnknownCountry";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::HttpStatusError: return "HttpStatusError";
    case ErrorCode::CacheWriteError: return "CacheWriteError";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::ZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NeedTwoPoints: return "NeedTwoPoints";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ProbOutOfRange: return "ProbOutOfRange";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::ZeroGroupWeight: return "ZeroGroupWeight";
    case ErrorCode::DegenerateDof: return "DegenerateDof";
    case ErrorCode::InvalidDof: return "InvalidDof";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidSpan: return "InvalidSpan";
    case ErrorCode::ZeroRange: return "ZeroRange";
    case ErrorCode::NegativeComponent: return "NegativeComponent";
    case ErrorCode::NeedThreePoints: return "NeedThreePoints";
    case ErrorCode::NonpositiveGDP: return "NonpositiveGDP";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::NonpositiveUrbanPop: return "NonpositiveUrbanPop";
    case ErrorCode::ZeroGlobalMean: return "ZeroGlobalMean";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace fsci
