#pragma once

#include "fsci/analysis.hpp"
#include "fsci/model.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fsci::report {

/// Blank, real, integer or text.
using Value = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Column {
    std::string name;
    int decimals = -1; // for reals: fixed decimals in the display form, -1 = shortest round-trip
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;

    /// Throws InvalidArgument when the row width differs from the column count.
    void add_row(std::vector<Value> row);
};

enum class Format { Csv, Json };

std::string_view to_string(Format format) noexcept;
Format parse_format(std::string_view text); // InvalidConfig

/// Display form: fixed decimals (negative zero printed without its sign),
/// "inf"/"-inf"/"nan" for non-finite reals, empty for blanks.
std::string display(const Value& value, int decimals);

/// Header plus one line per row, LF-terminated, display forms.
std::string render_csv(const Table& table);

/// {"columns", "display", "name", "rows"}: rows are objects keyed by column holding raw values (non-finite reals
/// as null), display mirrors the CSV strings. Two-space indent, trailing newline.
std::string render_json(const Table& table);

/// Writes `<dir>/<name>.<csv|json>` and returns the number of bytes written. Throws IoError.
std::size_t emit_table(const Table& table, Format format, const std::filesystem::path& dir);

// Pipeline ---------------------------------------------------------------------

enum class Analysis { Baseline, Coverage, Means, Deviations, GdpRelation, Resilience, All };

std::string_view to_string(Analysis analysis) noexcept;

struct RunConfig {
    std::filesystem::path codebook;
    std::filesystem::path countries;
    std::filesystem::path observations;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> column_mapping;
    std::optional<std::filesystem::path> cities;
    int min_year = 2000;
    int coverage_start = 2000;
    int coverage_end = 2021;
    std::vector<GroupingKind> groupings = {GroupingKind::Region, GroupingKind::IncomeGroup};
    double loess_span = 0.75;
    int loess_degree = 2;
    std::vector<Format> formats = {Format::Csv, Format::Json};
    unsigned threads = 1;
};

/// Flat `key = value` file; `#` starts a comment line. Relative paths resolve
/// against `base_dir`. Keys: codebook, countries, observations, output_dir,
/// column_mapping, cities, min_year, coverage_start, coverage_end, groupings
/// (comma list of region, income), loess_span, loess_degree, formats (comma
/// list of csv, json), threads. Throws InvalidConfig.
RunConfig load_config(std::istream& source, const std::filesystem::path& base_dir = {});
RunConfig load_config_file(const std::filesystem::path& path);

/// Range checks on the numeric settings. Throws InvalidConfig.
void validate_config(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAnalysis = 3;

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> files; // bundle file names, sorted
    std::string message;            // first line of the failure, empty on success
};

/// Loads, validates and analyses the inputs, then swaps the finished bundle into
/// `output_dir`. On failure the output directory is left as it was and the
/// problem is written to `<output_dir>.errors.log`.
RunResult run_pipeline(const RunConfig& config, Analysis analysis = Analysis::All);

/// Engine version recorded in manifests.
std::string_view engine_version() noexcept;

} // namespace fsci::report
