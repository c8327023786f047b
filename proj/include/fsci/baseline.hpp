#pragma once

#include "fsci/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace fsci {

struct BaselineCell {
    int year = 0;
    double value = 0.0;

    friend bool operator==(const BaselineCell&, const BaselineCell&) = default;
};

/// Shares of baseline cells by vintage. Bands: 2017 and later, 2010–2016, 2009 and earlier.
struct VintageSummary {
    double recent = 0.0;
    double middle = 0.0;
    double early = 0.0;

    friend bool operator==(const VintageSummary&, const VintageSummary&) = default;
};

/// Latest observation per (country, indicator).
struct Baseline {
    std::map<CellKey, BaselineCell> cells;
    VintageSummary vintage;

    const BaselineCell* find(std::string_view country, std::string_view indicator) const;
    /// (country, cell) pairs of one indicator, ordered by country code.
    std::vector<std::pair<std::string, BaselineCell>> for_indicator(std::string_view indicator) const;
};

struct DroppedCell {
    std::string country;
    std::string indicator;
    int year = 0;

    friend bool operator==(const DroppedCell&, const DroppedCell&) = default;
};

struct BaselineBuild {
    Baseline baseline;
    std::vector<DroppedCell> dropped;
};

/// Takes the maximum-year observation of every codebook series; pairs whose latest
/// year is before `min_year` are dropped and listed. Reserved series are skipped.
BaselineBuild build_baseline(const Panel& panel, int min_year = 2000);

/// Count of distinct observed years in [start, end] per (country, indicator).
/// Pairs with no in-window data are absent.
struct CoverageMatrix {
    int start = 2000;
    int end = 2021;
    std::map<CellKey, int> counts;
};

/// Throws InvalidWindow when start > end.
CoverageMatrix coverage_matrix(const Panel& panel, int start = 2000, int end = 2021);

} // namespace fsci
