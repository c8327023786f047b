#include "fsci/baseline.hpp"

#include "fsci/error.hpp"

namespace fsci {

const BaselineCell* Baseline::find(std::string_view country, std::string_view indicator) const {
    const auto it = cells.find(CellKey{std::string(country), std::string(indicator)});
    return it == cells.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, BaselineCell>> Baseline::for_indicator(std::string_view indicator) const {
    std::vector<std::pair<std::string, BaselineCell>> out;
    for (const auto& [key, cell] : cells) {
        if (key.second == indicator) out.emplace_back(key.first, cell);
    }
    return out;
}

BaselineBuild build_baseline(const Panel& panel, int min_year) {
    BaselineBuild out;
    std::size_t recent = 0, middle = 0, early = 0;
    for (const auto& [key, series] : panel.cells()) {
        if (is_reserved_series(key.second) || series.empty()) continue;
        const auto& [year, value] = *series.rbegin();
        if (year < min_year) {
            out.dropped.push_back({key.first, key.second, year});
            continue;
        }
        out.baseline.cells.emplace(key, BaselineCell{year, value});
        if (year >= 2017) {
            ++recent;
        } else if (year >= 2010) {
            ++middle;
        } else {
            ++early;
        }
    }
    if (const auto n = out.baseline.cells.size(); n > 0) {
        const auto total = static_cast<double>(n);
        out.baseline.vintage = {static_cast<double>(recent) / total, static_cast<double>(middle) / total,
                                static_cast<double>(early) / total};
    }
    return out;
}

CoverageMatrix coverage_matrix(const Panel& panel, int start, int end) {
    if (start > end) {
        throw Error(ErrorCode::InvalidWindow, std::to_string(start) + " > " + std::to_string(end));
    }
    CoverageMatrix out{start, end, {}};
    for (const auto& [key, series] : panel.cells()) {
        if (is_reserved_series(key.second)) continue;
        const auto first = series.lower_bound(start);
        const auto last = series.upper_bound(end);
        const auto count = static_cast<int>(std::distance(first, last));
        if (count > 0) out.counts.emplace(key, count);
    }
    return out;
}

} // namespace fsci
