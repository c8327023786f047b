#pragma once

#include "fsci/model.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace fsci {

struct ValidationIssue {
    std::size_t row = 0; // 1-based line in the source file; 0 when not row-specific
    std::string rule;
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;

    bool ok() const noexcept { return errors.empty(); }
    std::size_t total_rows() const noexcept { return rows_accepted + rows_rejected; }

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Codebook CSV with header
/// `indicator_id,name,unit,theme,domain,direction,weight_key,value_added`.
/// Throws fsci::Error naming the offending line (DuplicateIndicatorId,
/// UnknownDirection, UnknownWeightKey, UnknownTheme, MalformedRow, MalformedCsv).
IndicatorRegistry load_codebook(std::istream& source);

/// Country table CSV with header `iso3,name,region,income_group,un_member`.
CountryTable load_countries(std::istream& source);

/// Header renames applied before validation (`from,to` CSV).
using ColumnMapping = std::map<std::string, std::string>;
ColumnMapping load_column_mapping(std::istream& source);

struct PanelLoad {
    Panel panel;
    ValidationReport report;
};

/// Observation CSV with header `iso3,indicator_id,year,value`.
///
/// Rows before 1960 are rejected with a warning. Rows for non-member territories
/// are rejected unless the territory clears territory_filter. Unparseable values,
/// duplicate cells, unknown indicators and unknown countries are row errors.
/// The returned panel holds every accepted row; callers must check report.ok().
PanelLoad load_panel(std::istream& source, std::shared_ptr<const IndicatorRegistry> registry,
                     std::shared_ptr<const CountryTable> countries, const ColumnMapping* mapping = nullptr);

/// Coverage threshold for non-member territories (inclusive).
inline constexpr double kTerritoryCoverage = 0.80;

/// Non-member territories in `draft` observing at least 80% of the registry's
/// indicator ids. Dropped territories are reported as warnings when `report` is set.
std::set<std::string> territory_filter(const std::vector<Observation>& draft, const IndicatorRegistry& registry,
                                       const CountryTable& countries, ValidationReport* report = nullptr);

struct FetchResult {
    std::filesystem::path path;
    std::string sha256;
    bool from_cache = false;
};

/// Plain HTTP(S) GET with an on-disk cache at `<cache_dir>/<sha256(url)>.csv`
/// plus a `.meta` sidecar of three `key=value` lines (url, fetched_at, sha256).
/// A cached file younger than `max_age` is returned without touching the network.
/// Throws NetworkError, HttpStatusError or CacheWriteError.
FetchResult fetch_source(const std::string& url, const std::filesystem::path& cache_dir,
                         std::chrono::seconds max_age);

/// `FSCI_CACHE_DIR` when set, otherwise `.fsci-cache` under the working directory.
std::filesystem::path default_cache_dir();

} // namespace fsci
